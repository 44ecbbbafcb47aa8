#include "eeglab/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eeglab {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

// Groups the roots of a real polynomial (given as a root list) into
// conjugate/real pairs, one pair per biquad. Assumes an even count.
std::vector<std::pair<cplx, cplx>> pair_roots(std::vector<cplx> roots) {
    const double tol = 1e-8;
    std::vector<cplx> complex_roots, real_roots;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > tol * std::max(1.0, std::abs(r)))
            complex_roots.push_back(r);
        else
            real_roots.emplace_back(r.real(), 0.0);
    }
    std::vector<std::pair<cplx, cplx>> pairs;
    auto by_re_im = [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    };
    std::sort(complex_roots.begin(), complex_roots.end(), by_re_im);
    std::vector<bool> used(complex_roots.size(), false);
    for (std::size_t i = 0; i < complex_roots.size(); ++i) {
        if (used[i] || complex_roots[i].imag() <= 0.0) continue;
        // Find the closest unused conjugate partner.
        std::size_t best = complex_roots.size();
        double best_d = 0.0;
        for (std::size_t j = 0; j < complex_roots.size(); ++j) {
            if (used[j] || j == i || complex_roots[j].imag() > 0.0) continue;
            double d = std::abs(complex_roots[j] - std::conj(complex_roots[i]));
            if (best == complex_roots.size() || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        if (best == complex_roots.size())
            throw SpecError("unpaired complex pole/zero in filter design");
        used[i] = used[best] = true;
        pairs.emplace_back(complex_roots[i], complex_roots[best]);
    }
    std::sort(real_roots.begin(), real_roots.end(), by_re_im);
    for (std::size_t i = 0; i + 1 < real_roots.size(); i += 2)
        pairs.emplace_back(real_roots[i], real_roots[i + 1]);
    return pairs;
}

void check_stable(const FilterSpec& spec) {
    if (!spec.stable()) throw SpecError("designed filter has unstable section");
}

}  // namespace

double Biquad::pole_modulus() const {
    double disc = a1 * a1 - 4.0 * a2;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        return std::max(std::abs((-a1 + s) / 2.0), std::abs((-a1 - s) / 2.0));
    }
    return std::sqrt(a2);
}

bool FilterSpec::stable() const {
    for (const auto& s : sections)
        if (!(s.pole_modulus() < 1.0)) return false;
    return true;
}

FilterSpec design_bandpass(double low_hz, double high_hz, double fs) {
    if (!(fs > 0.0)) throw CutoffError("sampling rate must be positive");
    if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < fs / 2.0))
        throw CutoffError("bandpass cutoffs must satisfy 0 < low < high < fs/2");

    // Order-2 Butterworth analog prototype (poles only, unit gain).
    const int n = 2;
    std::vector<cplx> proto;
    for (int k = 0; k < n; ++k) {
        double theta = kPi * (2.0 * k + n + 1.0) / (2.0 * n);
        proto.push_back(std::exp(cplx(0.0, theta)));
    }

    // Pre-warp the band edges for the bilinear transform.
    double w1 = 2.0 * fs * std::tan(kPi * low_hz / fs);
    double w2 = 2.0 * fs * std::tan(kPi * high_hz / fs);
    double bw = w2 - w1;
    double w0 = std::sqrt(w1 * w2);

    // Lowpass prototype -> bandpass (zpk form). The prototype has no zeros,
    // so the transform contributes n zeros at s=0 and gain bw^n.
    std::vector<cplx> poles;
    for (const auto& p : proto) {
        cplx t = p * (bw / 2.0);
        cplx r = std::sqrt(t * t - cplx(w0 * w0, 0.0));
        poles.push_back(t + r);
        poles.push_back(t - r);
    }
    double k_analog = std::pow(bw, n);

    // Bilinear transform: s -> 2 fs (z-1)/(z+1). Analog zeros at the origin
    // map to z=+1; the (poles - zeros) degree surplus lands at z=-1.
    const double fs2 = 2.0 * fs;
    std::vector<cplx> zpoles, zzeros;
    cplx num_prod(1.0, 0.0), den_prod(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        zzeros.emplace_back(1.0, 0.0);          // image of s=0
        num_prod *= cplx(fs2, 0.0);             // fs2 - 0
    }
    for (const auto& p : poles) {
        zpoles.push_back((cplx(fs2, 0.0) + p) / (cplx(fs2, 0.0) - p));
        den_prod *= cplx(fs2, 0.0) - p;
    }
    for (int i = 0; i < n; ++i) zzeros.emplace_back(-1.0, 0.0);
    double k_digital = k_analog * (num_prod / den_prod).real();

    // Two biquads: each takes one conjugate pole pair and the zero pair
    // {+1,-1}; the overall gain is split evenly across sections.
    auto pole_pairs = pair_roots(zpoles);
    if (pole_pairs.size() != 2)
        throw SpecError("bandpass design expected two pole pairs");
    double g = std::sqrt(std::abs(k_digital));
    double g_first = (k_digital < 0.0) ? -g : g;

    FilterSpec spec;
    spec.kind = FilterKind::bandpass;
    spec.lo = low_hz;
    spec.hi = high_hz;
    spec.fs = fs;
    for (std::size_t i = 0; i < pole_pairs.size(); ++i) {
        const auto& [p1, p2] = pole_pairs[i];
        double gain = (i == 0) ? g_first : g;
        Biquad s;
        s.b0 = gain;
        s.b1 = 0.0;          // zeros at +1 and -1: (z-1)(z+1) = z^2 - 1
        s.b2 = -gain;
        s.a1 = -(p1 + p2).real();
        s.a2 = (p1 * p2).real();
        spec.sections.push_back(s);
    }
    check_stable(spec);
    return spec;
}

FilterSpec design_notch(double center_hz, double q, double fs) {
    if (!(fs > 0.0)) throw CutoffError("sampling rate must be positive");
    if (!(center_hz > 0.0) || !(center_hz < fs / 2.0))
        throw CutoffError("notch center must lie in (0, fs/2)");
    if (!(q > 0.0)) throw CutoffError("notch Q must be positive");

    double w0 = 2.0 * kPi * center_hz / fs;
    double alpha = std::sin(w0) / (2.0 * q);
    double cw = std::cos(w0);
    double a0 = 1.0 + alpha;

    Biquad s;
    s.b0 = 1.0 / a0;
    s.b1 = -2.0 * cw / a0;
    s.b2 = 1.0 / a0;
    s.a1 = -2.0 * cw / a0;
    s.a2 = (1.0 - alpha) / a0;

    FilterSpec spec;
    spec.kind = FilterKind::notch;
    spec.lo = center_hz;
    spec.hi = q;
    spec.fs = fs;
    spec.sections.push_back(s);
    check_stable(spec);
    return spec;
}

std::complex<double> frequency_response(const FilterSpec& spec, double freq_hz) {
    double w = 2.0 * kPi * freq_hz / spec.fs;
    cplx z1 = std::exp(cplx(0.0, -w));
    cplx z2 = z1 * z1;
    cplx h(1.0, 0.0);
    for (const auto& s : spec.sections) {
        cplx num = cplx(s.b0, 0.0) + s.b1 * z1 + s.b2 * z2;
        cplx den = cplx(1.0, 0.0) + s.a1 * z1 + s.a2 * z2;
        h *= num / den;
    }
    return h;
}

double gain_at(const FilterSpec& spec, double freq_hz) {
    return std::abs(frequency_response(spec, freq_hz));
}

namespace {

void run_cascade(const FilterSpec& spec, std::vector<double>& x) {
    for (const auto& s : spec.sections) {
        double w1 = 0.0, w2 = 0.0;
        for (double& v : x) {
            double in = v;
            double out = s.b0 * in + w1;
            w1 = s.b1 * in - s.a1 * out + w2;
            w2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
}

}  // namespace

std::vector<double> filter_signal(const FilterSpec& spec,
                                  const std::vector<double>& x,
                                  bool zero_phase) {
    for (double v : x)
        if (!std::isfinite(v)) throw DataError("non-finite sample in filter input");
    std::vector<double> y = x;
    run_cascade(spec, y);
    if (zero_phase) {
        std::reverse(y.begin(), y.end());
        run_cascade(spec, y);
        std::reverse(y.begin(), y.end());
    }
    return y;
}

Mat apply_filter(const FilterSpec& spec, const Mat& m, bool zero_phase) {
    if (!m.all_finite()) throw DataError("non-finite sample in filter input");
    Mat out(m.rows, m.cols);
    std::vector<double> ch(m.cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* src = m.row(r);
        std::copy(src, src + m.cols, ch.begin());
        run_cascade(spec, ch);
        if (zero_phase) {
            std::reverse(ch.begin(), ch.end());
            run_cascade(spec, ch);
            std::reverse(ch.begin(), ch.end());
        }
        std::copy(ch.begin(), ch.end(), out.row(r));
    }
    return out;
}

Recording apply_filter(const FilterSpec& spec, const Recording& rec,
                       bool zero_phase) {
    Recording out = rec;
    out.samples = apply_filter(spec, rec.samples, zero_phase);
    return out;
}

}  // namespace eeglab
