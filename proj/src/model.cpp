#include "eeglab/model.hpp"

#include <algorithm>
#include <cmath>

#include "eeglab/rng.hpp"

namespace eeglab {

std::string family_name(Family f) {
    switch (f) {
        case Family::linear_softmax: return "linear-softmax";
        case Family::channelwise_cnn: return "channelwise-cnn";
        case Family::pooled_cnn: return "pooled-cnn";
        case Family::recurrent_encoder: return "recurrent-encoder";
    }
    throw SpecError("bad family");
}

Family family_from_name(const std::string& s) {
    if (s == "linear-softmax") return Family::linear_softmax;
    if (s == "channelwise-cnn") return Family::channelwise_cnn;
    if (s == "pooled-cnn") return Family::pooled_cnn;
    if (s == "recurrent-encoder") return Family::recurrent_encoder;
    throw SpecError("unknown model family: " + s);
}

std::string head_name(Head h) {
    switch (h) {
        case Head::direct: return "direct";
        case Head::fc40: return "fc40";
        case Head::relu_fc40: return "relu-fc40";
        case Head::relu_only: return "relu-only";
    }
    throw SpecError("bad head");
}

Head head_from_name(const std::string& s) {
    if (s == "direct") return Head::direct;
    if (s == "fc40") return Head::fc40;
    if (s == "relu-fc40") return Head::relu_fc40;
    if (s == "relu-only") return Head::relu_only;
    throw SpecError("unknown head: " + s);
}

ModelSpec ModelSpec::resolved() const {
    ModelSpec r = *this;
    if (r.downsample_factor == 0)
        r.downsample_factor = (family == Family::recurrent_encoder) ? 4 : 1;
    return r;
}

std::size_t ModelSpec::steps() const {
    std::size_t df = downsample_factor ? downsample_factor : 1;
    return input_len / df;
}

std::size_t ModelSpec::conv_positions() const {
    std::size_t t = steps();
    if (t < kernel) throw SpecError("kernel longer than downsampled input");
    return (t - kernel) / stride + 1;
}

std::size_t ModelSpec::feature_dim() const {
    switch (family) {
        case Family::linear_softmax: return n_channels * steps();
        case Family::channelwise_cnn:
            return n_channels * conv_filters * pool_bins;
        case Family::pooled_cnn: return conv_filters * pool_bins;
        case Family::recurrent_encoder: return hidden;
    }
    throw SpecError("bad family");
}

std::size_t ModelSpec::encode_dim() const {
    return (head == Head::direct || head == Head::fc40) ? n_classes
                                                        : encoder_dim;
}

namespace {

struct Layout {
    std::size_t conv_w = 0, conv_w_n = 0;
    std::size_t conv_b = 0, conv_b_n = 0;
    std::size_t wx = 0, wx_n = 0;
    std::size_t wh = 0, wh_n = 0;
    std::size_t lb = 0, lb_n = 0;
    std::size_t w1 = 0, w1_n = 0;
    std::size_t b1 = 0, b1_n = 0;
    std::size_t w2 = 0, w2_n = 0;
    std::size_t b2 = 0, b2_n = 0;
    std::size_t total = 0;
};

Layout layout_of(const ModelSpec& s) {
    Layout l;
    std::size_t at = 0;
    auto block = [&](std::size_t n) {
        std::size_t off = at;
        at += n;
        return off;
    };
    const std::size_t C = s.n_channels, F = s.conv_filters, K = s.kernel,
                      H = s.hidden;
    switch (s.family) {
        case Family::linear_softmax: break;
        case Family::channelwise_cnn:
            l.conv_w_n = C * F * K;
            l.conv_w = block(l.conv_w_n);
            l.conv_b_n = C * F;
            l.conv_b = block(l.conv_b_n);
            break;
        case Family::pooled_cnn:
            l.conv_w_n = F * C * K;
            l.conv_w = block(l.conv_w_n);
            l.conv_b_n = F;
            l.conv_b = block(l.conv_b_n);
            break;
        case Family::recurrent_encoder:
            l.wx_n = 4 * H * C;
            l.wx = block(l.wx_n);
            l.wh_n = 4 * H * H;
            l.wh = block(l.wh_n);
            l.lb_n = 4 * H;
            l.lb = block(l.lb_n);
            break;
    }
    const std::size_t D = s.feature_dim(), E = s.encoder_dim,
                      Kc = s.n_classes;
    switch (s.head) {
        case Head::direct:
        case Head::fc40:
            l.w1_n = Kc * D;
            l.w1 = block(l.w1_n);
            l.b1_n = Kc;
            l.b1 = block(l.b1_n);
            break;
        case Head::relu_only:
            l.w1_n = E * D;
            l.w1 = block(l.w1_n);
            l.b1_n = E;
            l.b1 = block(l.b1_n);
            break;
        case Head::relu_fc40:
            l.w1_n = E * D;
            l.w1 = block(l.w1_n);
            l.b1_n = E;
            l.b1 = block(l.b1_n);
            l.w2_n = Kc * E;
            l.w2 = block(l.w2_n);
            l.b2_n = Kc;
            l.b2 = block(l.b2_n);
            break;
    }
    l.total = at;
    return l;
}

}  // namespace

std::size_t ModelSpec::param_count() const { return layout_of(*this).total; }

void ModelSpec::validate() const {
    if (n_channels < 1 || input_len < 1 || n_classes < 2)
        throw SpecError("model needs channels, samples and >= 2 classes");
    if (downsample_factor < 1)
        throw SpecError("validate() expects a resolved spec");
    if (steps() < 1) throw SpecError("downsampling leaves no samples");
    if ((head == Head::relu_only || head == Head::relu_fc40) &&
        encoder_dim < n_classes)
        throw SpecError("encoder_dim must be >= n_classes for relu heads");
    if (family == Family::channelwise_cnn || family == Family::pooled_cnn) {
        if (stride < 1) throw SpecError("stride must be >= 1");
        if (conv_filters < 1) throw SpecError("need at least one filter");
        if (conv_positions() < pool_bins)
            throw SpecError("fewer conv positions than pool bins");
    }
    if (family == Family::recurrent_encoder && hidden < 1)
        throw SpecError("hidden size must be >= 1");
}

TrainedModel build(const ModelSpec& spec_in, std::uint64_t seed) {
    ModelSpec spec = spec_in.resolved();
    spec.validate();
    Layout l = layout_of(spec);
    TrainedModel m;
    m.spec = spec;
    m.params.assign(l.total, 0.0);
    DetRng rng(seed);
    auto fill = [&](std::size_t off, std::size_t n, std::size_t fan_in) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < n; ++i)
            m.params[off + i] = rng.uniform(-bound, bound);
    };
    switch (spec.family) {
        case Family::linear_softmax: break;
        case Family::channelwise_cnn:
            fill(l.conv_w, l.conv_w_n, spec.kernel);
            break;
        case Family::pooled_cnn:
            fill(l.conv_w, l.conv_w_n, spec.n_channels * spec.kernel);
            break;
        case Family::recurrent_encoder:
            fill(l.wx, l.wx_n, spec.n_channels);
            fill(l.wh, l.wh_n, spec.hidden);
            break;
    }
    fill(l.w1, l.w1_n, spec.feature_dim());
    if (l.w2_n) fill(l.w2, l.w2_n, spec.encoder_dim);
    // Biases stay zero.
    return m;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void downsample(const ModelSpec& s, const Mat& x, std::vector<double>& xd) {
    const std::size_t C = s.n_channels, T = s.steps(),
                      df = s.downsample_factor;
    xd.resize(C * T);
    if (df == 1) {
        for (std::size_t c = 0; c < C; ++c) {
            const double* row = x.row(c);
            std::copy(row, row + T, xd.begin() + static_cast<std::ptrdiff_t>(c * T));
        }
        return;
    }
    const double inv = 1.0 / static_cast<double>(df);
    for (std::size_t c = 0; c < C; ++c) {
        const double* row = x.row(c);
        for (std::size_t t = 0; t < T; ++t) {
            double acc = 0.0;
            for (std::size_t j = 0; j < df; ++j) acc += row[t * df + j];
            xd[c * T + t] = acc * inv;
        }
    }
}

// Mean-pool positions [0,L) into P bins; bin p covers [p*L/P, (p+1)*L/P).
inline std::size_t bin_lo(std::size_t p, std::size_t L, std::size_t P) {
    return p * L / P;
}

void trunk_forward(const ModelSpec& s, const std::vector<double>& params,
                   const Layout& l, ModelWorkspace& ws) {
    const std::size_t C = s.n_channels, T = s.steps();
    switch (s.family) {
        case Family::linear_softmax:
            ws.feat = ws.xd;
            return;
        case Family::channelwise_cnn: {
            const std::size_t F = s.conv_filters, K = s.kernel, S = s.stride,
                              L = s.conv_positions(), P = s.pool_bins;
            ws.conv.resize(C * F * L);
            ws.feat.assign(C * F * P, 0.0);
            for (std::size_t c = 0; c < C; ++c) {
                const double* xc = ws.xd.data() + c * T;
                for (std::size_t f = 0; f < F; ++f) {
                    const double* w = params.data() + l.conv_w + (c * F + f) * K;
                    double b = params[l.conv_b + c * F + f];
                    double* cv = ws.conv.data() + (c * F + f) * L;
                    for (std::size_t pos = 0; pos < L; ++pos) {
                        double acc = b;
                        const double* xp = xc + pos * S;
                        for (std::size_t k = 0; k < K; ++k) acc += w[k] * xp[k];
                        cv[pos] = acc;
                    }
                    double* ft = ws.feat.data() + (c * F + f) * P;
                    for (std::size_t p = 0; p < P; ++p) {
                        std::size_t lo = bin_lo(p, L, P), hi = bin_lo(p + 1, L, P);
                        double acc = 0.0;
                        for (std::size_t pos = lo; pos < hi; ++pos)
                            acc += std::max(0.0, cv[pos]);
                        ft[p] = acc / static_cast<double>(hi - lo);
                    }
                }
            }
            return;
        }
        case Family::pooled_cnn: {
            const std::size_t F = s.conv_filters, K = s.kernel, S = s.stride,
                              L = s.conv_positions(), P = s.pool_bins;
            ws.conv.resize(F * L);
            ws.feat.assign(F * P, 0.0);
            for (std::size_t f = 0; f < F; ++f) {
                double b = params[l.conv_b + f];
                double* cv = ws.conv.data() + f * L;
                for (std::size_t pos = 0; pos < L; ++pos) {
                    double acc = b;
                    for (std::size_t c = 0; c < C; ++c) {
                        const double* w =
                            params.data() + l.conv_w + (f * C + c) * K;
                        const double* xp = ws.xd.data() + c * T + pos * S;
                        for (std::size_t k = 0; k < K; ++k) acc += w[k] * xp[k];
                    }
                    cv[pos] = acc;
                }
                double* ft = ws.feat.data() + f * P;
                for (std::size_t p = 0; p < P; ++p) {
                    std::size_t lo = bin_lo(p, L, P), hi = bin_lo(p + 1, L, P);
                    double acc = 0.0;
                    for (std::size_t pos = lo; pos < hi; ++pos)
                        acc += std::max(0.0, cv[pos]);
                    ft[p] = acc / static_cast<double>(hi - lo);
                }
            }
            return;
        }
        case Family::recurrent_encoder: {
            const std::size_t H = s.hidden;
            ws.gi.resize(T * H);
            ws.gf.resize(T * H);
            ws.gg.resize(T * H);
            ws.go.resize(T * H);
            ws.cs.resize(T * H);
            ws.hs.resize(T * H);
            ws.tanhc.resize(T * H);
            ws.dz.resize(4 * H);
            std::vector<double>& z = ws.dz;  // reused as forward scratch
            for (std::size_t t = 0; t < T; ++t) {
                const double* h_prev = t ? ws.hs.data() + (t - 1) * H : nullptr;
                const double* c_prev = t ? ws.cs.data() + (t - 1) * H : nullptr;
                for (std::size_t j = 0; j < 4 * H; ++j) {
                    double acc = params[l.lb + j];
                    const double* wx = params.data() + l.wx + j * C;
                    for (std::size_t c = 0; c < C; ++c)
                        acc += wx[c] * ws.xd[c * T + t];
                    if (h_prev) {
                        const double* wh = params.data() + l.wh + j * H;
                        for (std::size_t k = 0; k < H; ++k)
                            acc += wh[k] * h_prev[k];
                    }
                    z[j] = acc;
                }
                for (std::size_t h = 0; h < H; ++h) {
                    double gi = sigmoid(z[h]);
                    double gf = sigmoid(z[H + h]);
                    double gg = std::tanh(z[2 * H + h]);
                    double go = sigmoid(z[3 * H + h]);
                    double cp = c_prev ? c_prev[h] : 0.0;
                    double ct = gf * cp + gi * gg;
                    double th = std::tanh(ct);
                    ws.gi[t * H + h] = gi;
                    ws.gf[t * H + h] = gf;
                    ws.gg[t * H + h] = gg;
                    ws.go[t * H + h] = go;
                    ws.cs[t * H + h] = ct;
                    ws.tanhc[t * H + h] = th;
                    ws.hs[t * H + h] = go * th;
                }
            }
            ws.feat.assign(ws.hs.end() - static_cast<std::ptrdiff_t>(H),
                           ws.hs.end());
            return;
        }
    }
    throw SpecError("bad family");
}

void head_forward(const ModelSpec& s, const std::vector<double>& params,
                  const Layout& l, ModelWorkspace& ws) {
    const std::size_t D = s.feature_dim(), Kc = s.n_classes,
                      E = s.encoder_dim;
    auto fc = [&](std::size_t w_off, std::size_t b_off, std::size_t out_n,
                  const std::vector<double>& in, std::size_t in_n,
                  std::vector<double>& out) {
        out.resize(out_n);
        for (std::size_t o = 0; o < out_n; ++o) {
            double acc = params[b_off + o];
            const double* w = params.data() + w_off + o * in_n;
            for (std::size_t i = 0; i < in_n; ++i) acc += w[i] * in[i];
            out[o] = acc;
        }
    };
    switch (s.head) {
        case Head::direct:
        case Head::fc40:
            fc(l.w1, l.b1, Kc, ws.feat, D, ws.logits);
            ws.enc = ws.logits;
            return;
        case Head::relu_only:
            fc(l.w1, l.b1, E, ws.feat, D, ws.act1);
            ws.enc.resize(E);
            for (std::size_t e = 0; e < E; ++e)
                ws.enc[e] = std::max(0.0, ws.act1[e]);
            ws.logits.assign(ws.enc.begin(),
                             ws.enc.begin() + static_cast<std::ptrdiff_t>(Kc));
            return;
        case Head::relu_fc40:
            fc(l.w1, l.b1, E, ws.feat, D, ws.act1);
            ws.enc.resize(E);
            for (std::size_t e = 0; e < E; ++e)
                ws.enc[e] = std::max(0.0, ws.act1[e]);
            fc(l.w2, l.b2, Kc, ws.enc, E, ws.logits);
            return;
    }
    throw SpecError("bad head");
}

}  // namespace

void forward(const ModelSpec& spec, const std::vector<double>& params,
             const Mat& x, ModelWorkspace& ws) {
    if (x.rows != spec.n_channels || x.cols != spec.input_len)
        throw SpecError("input dims do not match model spec");
    Layout l = layout_of(spec);
    if (params.size() != l.total) throw SpecError("parameter count mismatch");
    downsample(spec, x, ws.xd);
    trunk_forward(spec, params, l, ws);
    head_forward(spec, params, l, ws);
}

double loss_and_grad(const ModelSpec& spec, const std::vector<double>& params,
                     const Mat& x, int label, ModelWorkspace& ws,
                     std::vector<double>& grad) {
    const std::size_t Kc = spec.n_classes;
    if (label < 0 || static_cast<std::size_t>(label) >= Kc)
        throw SpecError("label out of range");
    forward(spec, params, x, ws);
    Layout l = layout_of(spec);
    if (grad.size() != params.size()) grad.assign(params.size(), 0.0);

    // Softmax cross-entropy.
    ws.probs.resize(Kc);
    double mx = ws.logits[0];
    for (double v : ws.logits) mx = std::max(mx, v);
    double z = 0.0;
    for (std::size_t k = 0; k < Kc; ++k) {
        ws.probs[k] = std::exp(ws.logits[k] - mx);
        z += ws.probs[k];
    }
    for (double& p : ws.probs) p /= z;
    double loss = -std::log(ws.probs[static_cast<std::size_t>(label)]);

    ws.dlogits = ws.probs;
    ws.dlogits[static_cast<std::size_t>(label)] -= 1.0;

    const std::size_t D = spec.feature_dim(), E = spec.encoder_dim;
    ws.dfeat.assign(D, 0.0);
    auto fc_backward = [&](std::size_t w_off, std::size_t b_off,
                           const std::vector<double>& dout, std::size_t out_n,
                           const std::vector<double>& in, std::size_t in_n,
                           std::vector<double>* din) {
        if (din) din->assign(in_n, 0.0);
        for (std::size_t o = 0; o < out_n; ++o) {
            double g = dout[o];
            grad[b_off + o] += g;
            double* gw = grad.data() + w_off + o * in_n;
            const double* w = params.data() + w_off + o * in_n;
            for (std::size_t i = 0; i < in_n; ++i) {
                gw[i] += g * in[i];
                if (din) (*din)[i] += g * w[i];
            }
        }
    };
    switch (spec.head) {
        case Head::direct:
        case Head::fc40:
            fc_backward(l.w1, l.b1, ws.dlogits, Kc, ws.feat, D, &ws.dfeat);
            break;
        case Head::relu_only:
            ws.dact1.assign(E, 0.0);
            for (std::size_t k = 0; k < Kc; ++k)
                if (ws.act1[k] > 0.0) ws.dact1[k] = ws.dlogits[k];
            fc_backward(l.w1, l.b1, ws.dact1, E, ws.feat, D, &ws.dfeat);
            break;
        case Head::relu_fc40:
            fc_backward(l.w2, l.b2, ws.dlogits, Kc, ws.enc, E, &ws.denc);
            ws.dact1.assign(E, 0.0);
            for (std::size_t e = 0; e < E; ++e)
                if (ws.act1[e] > 0.0) ws.dact1[e] = ws.denc[e];
            fc_backward(l.w1, l.b1, ws.dact1, E, ws.feat, D, &ws.dfeat);
            break;
    }

    const std::size_t C = spec.n_channels, T = spec.steps();
    switch (spec.family) {
        case Family::linear_softmax:
            break;
        case Family::channelwise_cnn: {
            const std::size_t F = spec.conv_filters, K = spec.kernel,
                              S = spec.stride, L = spec.conv_positions(),
                              P = spec.pool_bins;
            for (std::size_t c = 0; c < C; ++c) {
                const double* xc = ws.xd.data() + c * T;
                for (std::size_t f = 0; f < F; ++f) {
                    const double* cv = ws.conv.data() + (c * F + f) * L;
                    double* gw = grad.data() + l.conv_w + (c * F + f) * K;
                    double& gb = grad[l.conv_b + c * F + f];
                    for (std::size_t p = 0; p < P; ++p) {
                        std::size_t lo = bin_lo(p, L, P),
                                    hi = bin_lo(p + 1, L, P);
                        double g0 = ws.dfeat[(c * F + f) * P + p] /
                                    static_cast<double>(hi - lo);
                        for (std::size_t pos = lo; pos < hi; ++pos) {
                            if (cv[pos] <= 0.0) continue;
                            const double* xp = xc + pos * S;
                            for (std::size_t k = 0; k < K; ++k)
                                gw[k] += g0 * xp[k];
                            gb += g0;
                        }
                    }
                }
            }
            break;
        }
        case Family::pooled_cnn: {
            const std::size_t F = spec.conv_filters, K = spec.kernel,
                              S = spec.stride, L = spec.conv_positions(),
                              P = spec.pool_bins;
            for (std::size_t f = 0; f < F; ++f) {
                const double* cv = ws.conv.data() + f * L;
                double& gb = grad[l.conv_b + f];
                for (std::size_t p = 0; p < P; ++p) {
                    std::size_t lo = bin_lo(p, L, P), hi = bin_lo(p + 1, L, P);
                    double g0 =
                        ws.dfeat[f * P + p] / static_cast<double>(hi - lo);
                    for (std::size_t pos = lo; pos < hi; ++pos) {
                        if (cv[pos] <= 0.0) continue;
                        for (std::size_t c = 0; c < C; ++c) {
                            double* gw =
                                grad.data() + l.conv_w + (f * C + c) * K;
                            const double* xp = ws.xd.data() + c * T + pos * S;
                            for (std::size_t k = 0; k < K; ++k)
                                gw[k] += g0 * xp[k];
                        }
                        gb += g0;
                    }
                }
            }
            break;
        }
        case Family::recurrent_encoder: {
            const std::size_t H = spec.hidden;
            ws.dh = ws.dfeat;  // gradient w.r.t. last hidden state
            ws.dc.assign(H, 0.0);
            std::vector<double>& dz = ws.dz;
            dz.assign(4 * H, 0.0);
            for (std::size_t t = T; t-- > 0;) {
                const double* h_prev = t ? ws.hs.data() + (t - 1) * H : nullptr;
                const double* c_prev = t ? ws.cs.data() + (t - 1) * H : nullptr;
                for (std::size_t h = 0; h < H; ++h) {
                    double gi = ws.gi[t * H + h], gf = ws.gf[t * H + h],
                           gg = ws.gg[t * H + h], go = ws.go[t * H + h],
                           th = ws.tanhc[t * H + h];
                    double dht = ws.dh[h];
                    double dct = ws.dc[h] + dht * go * (1.0 - th * th);
                    double dgo = dht * th;
                    double dgi = dct * gg;
                    double dgg = dct * gi;
                    double cp = c_prev ? c_prev[h] : 0.0;
                    double dgf = dct * cp;
                    dz[h] = dgi * gi * (1.0 - gi);
                    dz[H + h] = dgf * gf * (1.0 - gf);
                    dz[2 * H + h] = dgg * (1.0 - gg * gg);
                    dz[3 * H + h] = dgo * go * (1.0 - go);
                    ws.dc[h] = dct * gf;  // carried to step t-1
                }
                for (std::size_t h = 0; h < H; ++h) ws.dh[h] = 0.0;
                for (std::size_t j = 0; j < 4 * H; ++j) {
                    double g = dz[j];
                    if (g == 0.0) continue;
                    grad[l.lb + j] += g;
                    double* gwx = grad.data() + l.wx + j * C;
                    for (std::size_t c = 0; c < C; ++c)
                        gwx[c] += g * ws.xd[c * T + t];
                    if (h_prev) {
                        double* gwh = grad.data() + l.wh + j * H;
                        const double* wh = params.data() + l.wh + j * H;
                        for (std::size_t k = 0; k < H; ++k) {
                            gwh[k] += g * h_prev[k];
                            ws.dh[k] += g * wh[k];
                        }
                    }
                }
            }
            break;
        }
    }
    return loss;
}

std::vector<double> logits_of(const TrainedModel& m, const Mat& x) {
    ModelWorkspace ws;
    forward(m.spec, m.params, x, ws);
    return ws.logits;
}

std::vector<double> encode(const TrainedModel& m, const Segment& seg) {
    ModelWorkspace ws;
    forward(m.spec, m.params, seg.samples, ws);
    return ws.enc;
}

int predict(const TrainedModel& m, const Mat& x) {
    auto lg = logits_of(m, x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < lg.size(); ++k)
        if (lg[k] > lg[best]) best = k;
    return static_cast<int>(best);
}

}  // namespace eeglab
