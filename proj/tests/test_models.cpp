#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "eeglab/checkpoint.hpp"
#include "eeglab/model.hpp"
#include "eeglab/rng.hpp"
#include "eeglab/train.hpp"

using namespace eeglab;

namespace {

Mat random_input(std::size_t channels, std::size_t len, std::uint64_t seed) {
    DetRng rng(seed);
    Mat x(channels, len);
    for (auto& v : x.v) v = rng.normal();
    return x;
}

Segment wrap(Mat samples, int label) {
    Segment s;
    s.samples = std::move(samples);
    s.class_label = label;
    return s;
}

std::vector<std::size_t> iota_idx(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> v;
    for (std::size_t i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

// Central-difference gradient check over a spread of parameter indices.
double max_grad_mismatch(const ModelSpec& spec, std::uint64_t seed) {
    TrainedModel m = build(spec, seed);
    ModelSpec rs = m.spec;
    Mat x = random_input(rs.n_channels, rs.input_len, seed + 1);
    const int label = static_cast<int>(seed % rs.n_classes);

    ModelWorkspace ws;
    std::vector<double> grad(m.params.size(), 0.0);
    loss_and_grad(rs, m.params, x, label, ws, grad);

    std::vector<double> dummy(m.params.size());
    const double eps = 1e-5;
    double worst = 0.0;
    const std::size_t probes = 25;
    for (std::size_t k = 0; k < probes; ++k) {
        std::size_t j = k * (m.params.size() - 1) / (probes - 1);
        std::vector<double> p = m.params;
        p[j] += eps;
        std::fill(dummy.begin(), dummy.end(), 0.0);
        double up = loss_and_grad(rs, p, x, label, ws, dummy);
        p[j] -= 2.0 * eps;
        std::fill(dummy.begin(), dummy.end(), 0.0);
        double dn = loss_and_grad(rs, p, x, label, ws, dummy);
        double fd = (up - dn) / (2.0 * eps);
        double rel = std::abs(grad[j] - fd) /
                     std::max(1.0, std::abs(grad[j]) + std::abs(fd));
        worst = std::max(worst, rel);
    }
    return worst;
}

ModelSpec reduced_spec(Family family, Head head) {
    ModelSpec s;
    s.family = family;
    s.head = head;
    s.n_channels = 8;
    s.input_len = 32;
    s.n_classes = 4;
    s.encoder_dim = 8;
    s.hidden = 10;
    s.conv_filters = 3;
    return s;
}

}  // namespace

TEST_CASE("parameter counts match the architecture arithmetic") {
    ModelSpec lin;
    lin.family = Family::linear_softmax;
    lin.head = Head::direct;
    lin.n_channels = 128;
    lin.input_len = 440;
    lin.n_classes = 40;
    CHECK(lin.resolved().param_count() == 128u * 440u * 40u + 40u);

    ModelSpec cw;
    cw.family = Family::channelwise_cnn;
    cw.head = Head::direct;
    cw.n_channels = 16;
    cw.input_len = 440;
    cw.n_classes = 10;
    auto r = cw.resolved();
    // conv: C*F*K weights + C*F biases; head: K_c * (C*F*P) + K_c.
    std::size_t expect = 16u * 6u * 9u + 16u * 6u +
                         10u * (16u * 6u * 4u) + 10u;
    CHECK(r.param_count() == expect);

    ModelSpec rec;
    rec.family = Family::recurrent_encoder;
    rec.head = Head::relu_fc40;
    rec.n_channels = 12;
    rec.input_len = 440;
    rec.n_classes = 40;
    rec.encoder_dim = 128;
    rec.hidden = 32;
    auto rr = rec.resolved();
    std::size_t lstm = 4u * 32u * 12u + 4u * 32u * 32u + 4u * 32u;
    std::size_t head = 128u * 32u + 128u + 40u * 128u + 40u;
    CHECK(rr.param_count() == lstm + head);
    CHECK(build(rec, 1).params.size() == lstm + head);
}

TEST_CASE("LSTM4-style spec exposes a 128-dim encoding and 40-way head") {
    ModelSpec s;
    s.family = Family::recurrent_encoder;
    s.head = Head::relu_fc40;
    s.n_channels = 4;
    s.input_len = 64;
    s.n_classes = 40;
    s.encoder_dim = 128;
    s.hidden = 16;
    TrainedModel m = build(s, 5);
    CHECK(m.spec.downsample_factor == 4);  // family default
    CHECK(m.spec.encode_dim() == 128);
    Segment seg = wrap(random_input(4, 64, 2), 0);
    CHECK(encode(m, seg).size() == 128);
    CHECK(logits_of(m, seg.samples).size() == 40);

    ModelSpec f = s;
    f.head = Head::fc40;
    TrainedModel mf = build(f, 5);
    CHECK(mf.spec.encode_dim() == 40);
    CHECK(encode(mf, seg).size() == 40);
}

TEST_CASE("initialization is seeded, bounded, and leaves biases at zero") {
    ModelSpec s = reduced_spec(Family::channelwise_cnn, Head::direct);
    TrainedModel a = build(s, 77);
    TrainedModel b = build(s, 77);
    CHECK(a.params == b.params);
    TrainedModel c = build(s, 78);
    CHECK(a.params != c.params);

    // Head weight bound 1/sqrt(feature_dim); conv bound 1/sqrt(kernel).
    double maxw = 0.0;
    for (double v : a.params) maxw = std::max(maxw, std::abs(v));
    CHECK(maxw <= 1.0 / std::sqrt(9.0) + 1e-12);
    // Conv biases (after C*F*K weights) and head bias (tail) are zero.
    std::size_t cw = s.n_channels * s.conv_filters * s.kernel;
    for (std::size_t i = cw; i < cw + s.n_channels * s.conv_filters; ++i)
        CHECK(a.params[i] == 0.0);
    for (std::size_t i = a.params.size() - s.n_classes; i < a.params.size(); ++i)
        CHECK(a.params[i] == 0.0);
}

TEST_CASE("zero input maps straight to the head bias") {
    for (Family fam : {Family::linear_softmax, Family::channelwise_cnn}) {
        ModelSpec s = reduced_spec(fam, Head::direct);
        TrainedModel m = build(s, 3);
        // The head bias is the last n_classes parameters for direct heads.
        std::vector<double> want = {0.3, -1.2, 0.0, 2.5};
        std::size_t base = m.params.size() - s.n_classes;
        for (std::size_t k = 0; k < want.size(); ++k)
            m.params[base + k] = want[k];
        Mat zeros(s.n_channels, s.input_len);
        auto logits = logits_of(m, zeros);
        REQUIRE(logits.size() == want.size());
        for (std::size_t k = 0; k < want.size(); ++k)
            CHECK(logits[k] == doctest::Approx(want[k]).epsilon(1e-15));
        // encode() on direct heads is the same activation vector.
        Segment seg = wrap(std::move(zeros), 0);
        auto e = encode(m, seg);
        REQUIRE(e.size() == want.size());
        for (std::size_t k = 0; k < want.size(); ++k)
            CHECK(e[k] == doctest::Approx(want[k]).epsilon(1e-15));
    }
}

TEST_CASE("softmax probabilities are normalized and shift-invariant") {
    ModelSpec s = reduced_spec(Family::linear_softmax, Head::direct);
    TrainedModel m = build(s, 11);
    Mat x = random_input(s.n_channels, s.input_len, 4);
    ModelWorkspace ws;
    std::vector<double> grad(m.params.size(), 0.0);
    loss_and_grad(m.spec, m.params, x, 0, ws, grad);
    REQUIRE(ws.probs.size() == s.n_classes);
    double sum = 0.0;
    for (double p : ws.probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // Adding a constant to every logit (via the bias row) leaves probs alone.
    std::vector<double> probs0 = ws.probs;
    TrainedModel shifted = m;
    std::size_t base = shifted.params.size() - s.n_classes;
    for (std::size_t k = 0; k < s.n_classes; ++k)
        shifted.params[base + k] += 100.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    loss_and_grad(shifted.spec, shifted.params, x, 0, ws, grad);
    for (std::size_t k = 0; k < s.n_classes; ++k)
        CHECK(ws.probs[k] == doctest::Approx(probs0[k]).epsilon(1e-9));
}

TEST_CASE("analytic gradients match central finite differences") {
    // Every family at the reduced 8-channel / 32-step / 4-class size.
    CHECK(max_grad_mismatch(reduced_spec(Family::linear_softmax, Head::direct),
                            21) < 1e-4);
    CHECK(max_grad_mismatch(reduced_spec(Family::channelwise_cnn, Head::direct),
                            22) < 1e-4);
    CHECK(max_grad_mismatch(reduced_spec(Family::pooled_cnn, Head::direct),
                            23) < 1e-4);
    CHECK(max_grad_mismatch(
              reduced_spec(Family::recurrent_encoder, Head::direct), 24) <
          1e-4);
    // Every head variant, on the cheapest and the recurrent trunks.
    for (Head h : {Head::fc40, Head::relu_only, Head::relu_fc40}) {
        CHECK(max_grad_mismatch(reduced_spec(Family::linear_softmax, h), 31) <
              1e-4);
        CHECK(max_grad_mismatch(reduced_spec(Family::recurrent_encoder, h),
                                32) < 1e-4);
    }
    CHECK(max_grad_mismatch(reduced_spec(Family::channelwise_cnn,
                                         Head::relu_fc40), 33) < 1e-4);
    CHECK(max_grad_mismatch(reduced_spec(Family::pooled_cnn, Head::relu_only),
                            34) < 1e-4);
}

TEST_CASE("training trajectory is bit-deterministic in the seed") {
    ModelSpec s = reduced_spec(Family::linear_softmax, Head::direct);
    std::vector<Segment> data;
    DetRng rng(5);
    for (int k = 0; k < 24; ++k) {
        Mat x = random_input(s.n_channels, s.input_len, 100 + k);
        data.push_back(wrap(std::move(x), k % 4));
    }
    auto train_idx = iota_idx(0, 16), val_idx = iota_idx(16, 24);
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.seed = 42;
    TrainedModel a = train(build(s, 9), data, train_idx, val_idx,
                           LabelKind::class_label, cfg);
    TrainedModel b = train(build(s, 9), data, train_idx, val_idx,
                           LabelKind::class_label, cfg);
    CHECK(a.params == b.params);
    REQUIRE(a.history.size() == b.history.size());
    REQUIRE(a.history.size() == cfg.epochs);
    for (std::size_t e = 0; e < a.history.size(); ++e) {
        CHECK(a.history[e].train_loss == b.history[e].train_loss);
        CHECK(a.history[e].val_acc == b.history[e].val_acc);
    }
    CHECK(a.checkpoint_epoch == b.checkpoint_epoch);
}

TEST_CASE("separable three-cluster toy set trains to 99% in 50 epochs") {
    ModelSpec s;
    s.family = Family::linear_softmax;
    s.head = Head::direct;
    s.n_channels = 2;
    s.input_len = 8;
    s.n_classes = 3;
    // Three well-separated cluster centres, small isotropic scatter.
    DetRng rng(17);
    std::vector<Segment> data;
    for (int k = 0; k < 60; ++k) {
        int cls = k % 3;
        Mat x(2, 8);
        for (std::size_t i = 0; i < x.size(); ++i)
            x.v[i] = 3.0 * ((cls == 0) - (cls == 2)) +
                     ((i % 3 == static_cast<std::size_t>(cls)) ? 2.0 : -1.0) +
                     0.2 * rng.normal();
        data.push_back(wrap(std::move(x), cls));
    }
    auto train_idx = iota_idx(0, 48), val_idx = iota_idx(48, 60);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 1;
    TrainedModel m = train(build(s, 2), data, train_idx, val_idx,
                           LabelKind::class_label, cfg);
    CHECK(m.history.back().train_acc >= 0.99);
}

TEST_CASE("pure-noise forty-class set scores chance on validation") {
    ModelSpec s;
    s.family = Family::linear_softmax;
    s.head = Head::direct;
    s.n_channels = 4;
    s.input_len = 32;
    s.n_classes = 40;
    std::vector<Segment> data;
    for (int k = 0; k < 960; ++k)
        data.push_back(wrap(random_input(4, 32, 5000 + k), k % 40));
    auto train_idx = iota_idx(0, 560), val_idx = iota_idx(560, 960);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 7;
    TrainedModel m = train(build(s, 3), data, train_idx, val_idx,
                           LabelKind::class_label, cfg);
    double val = evaluate(m, data, val_idx, LabelKind::class_label);
    CHECK(val >= 0.025 - 0.02);
    CHECK(val <= 0.025 + 0.02);
}

TEST_CASE("the checkpoint is the earliest best-validation epoch") {
    ModelSpec s;
    s.family = Family::linear_softmax;
    s.head = Head::direct;
    s.n_channels = 2;
    s.input_len = 8;
    s.n_classes = 2;
    // Weak signal + noise so validation accuracy wobbles across epochs.
    DetRng rng(23);
    std::vector<Segment> data;
    for (int k = 0; k < 40; ++k) {
        int cls = k % 2;
        Mat x(2, 8);
        for (std::size_t i = 0; i < x.size(); ++i)
            x.v[i] = 0.25 * (cls ? 1.0 : -1.0) + rng.normal();
        data.push_back(wrap(std::move(x), cls));
    }
    auto train_idx = iota_idx(0, 24), val_idx = iota_idx(24, 40);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.lr = 0.02;
    cfg.seed = 3;
    TrainedModel m = train(build(s, 4), data, train_idx, val_idx,
                           LabelKind::class_label, cfg);
    REQUIRE(m.history.size() == cfg.epochs);

    std::size_t best = 0, worst = 0;
    for (std::size_t e = 1; e < m.history.size(); ++e) {
        if (m.history[e].val_acc > m.history[best].val_acc) best = e;
        if (m.history[e].val_acc < m.history[worst].val_acc) worst = e;
    }
    CHECK(m.checkpoint_epoch == best);
    CHECK(m.lowest_val_epoch == worst);
    // Returned parameters really are the checkpoint parameters.
    CHECK(evaluate(m, data, val_idx, LabelKind::class_label) ==
          m.history[m.checkpoint_epoch].val_acc);
    // The run this asserts on peaks before the final epoch, so checkpoint
    // selection is distinguishable from "use the last epoch".
    CHECK(m.checkpoint_epoch + 1 < cfg.epochs);
    CHECK(m.history[m.checkpoint_epoch].val_acc >
          m.history[cfg.epochs - 1].val_acc);
}

TEST_CASE("blank-pair evaluation of a constant predictor sits near 2/K") {
    ModelSpec s;
    s.family = Family::linear_softmax;
    s.head = Head::direct;
    s.n_channels = 1;
    s.input_len = 4;
    s.n_classes = 40;
    TrainedModel m = build(s, 6);
    std::fill(m.params.begin(), m.params.end(), 0.0);  // argmax -> class 0

    DetRng rng(29);
    std::vector<Segment> blanks;
    for (int k = 0; k < 6000; ++k) {
        Segment b;
        b.samples = Mat(1, 4);
        b.class_label = kBlankLabel;
        int prev = static_cast<int>(rng.uniform_int(40));
        int next;
        do {
            next = static_cast<int>(rng.uniform_int(40));
        } while (next == prev);
        b.blank_neighbors = std::make_pair(prev, next);
        blanks.push_back(std::move(b));
    }
    double acc = evaluate(m, blanks, LabelKind::blank_pair);
    CHECK(acc >= 0.05 - 0.015);
    CHECK(acc <= 0.05 + 0.015);
    CHECK(chance_level(s, LabelKind::blank_pair) == 0.05);
    CHECK(chance_level(s, LabelKind::class_label) == 0.025);
}

TEST_CASE("an oracle weight matrix scores 100%; empty evaluation throws") {
    ModelSpec s;
    s.family = Family::linear_softmax;
    s.head = Head::direct;
    s.n_channels = 1;
    s.input_len = 6;
    s.n_classes = 4;
    TrainedModel m = build(s, 8);
    std::fill(m.params.begin(), m.params.end(), 0.0);
    // logits_c = x[c]: weight W[c][c] = 1 over the flattened 6-dim input.
    for (std::size_t c = 0; c < 4; ++c) m.params[c * 6 + c] = 1.0;
    std::vector<Segment> data;
    for (int k = 0; k < 20; ++k) {
        Mat x(1, 6);
        x.v[static_cast<std::size_t>(k % 4)] = 10.0;
        data.push_back(wrap(std::move(x), k % 4));
    }
    CHECK(evaluate(m, data, LabelKind::class_label) == 1.0);
    std::vector<std::size_t> none;
    CHECK_THROWS_AS(evaluate(m, data, none, LabelKind::class_label), EvalError);
}

TEST_CASE("EEGM checkpoints round-trip through float32") {
    ModelSpec s = reduced_spec(Family::recurrent_encoder, Head::relu_fc40);
    std::vector<Segment> data;
    for (int k = 0; k < 12; ++k)
        data.push_back(wrap(random_input(s.n_channels, s.input_len, 70 + k),
                            k % 4));
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 2;
    TrainedModel m = train(build(s, 1), data, iota_idx(0, 8), iota_idx(8, 12),
                           LabelKind::class_label, cfg);
    const char* path = "model_test_roundtrip.eegm";
    save_model(path, m);
    TrainedModel r = load_model(path);
    CHECK(r.spec.family == m.spec.family);
    CHECK(r.spec.head == m.spec.head);
    CHECK(r.spec.n_channels == m.spec.n_channels);
    CHECK(r.spec.input_len == m.spec.input_len);
    CHECK(r.spec.n_classes == m.spec.n_classes);
    CHECK(r.spec.hidden == m.spec.hidden);
    CHECK(r.checkpoint_epoch == m.checkpoint_epoch);
    CHECK(r.trained == m.trained);
    REQUIRE(r.params.size() == m.params.size());
    for (std::size_t i = 0; i < m.params.size(); ++i)
        CHECK(r.params[i] ==
              static_cast<double>(static_cast<float>(m.params[i])));
    // Quantized weights still drive an identical evaluation path.
    Segment probe = wrap(random_input(s.n_channels, s.input_len, 500), 0);
    CHECK(encode(r, probe).size() == encode(m, probe).size());
    std::remove(path);
}

TEST_CASE("corrupt EEGM blobs are rejected") {
    const char* path = "model_test_corrupt.eegm";
    ModelSpec s = reduced_spec(Family::linear_softmax, Head::direct);
    save_model(path, build(s, 1));
    {
        std::FILE* f = std::fopen(path, "r+b");
        REQUIRE(f != nullptr);
        std::fputc('X', f);  // clobber the magic
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_model(path), DataError);
    std::remove(path);
}

TEST_CASE("divergence raises TrainingError carrying the epoch") {
    ModelSpec s = reduced_spec(Family::linear_softmax, Head::direct);
    std::vector<Segment> data;
    for (int k = 0; k < 16; ++k)
        data.push_back(wrap(random_input(s.n_channels, s.input_len, 300 + k),
                            k % 4));
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.lr = 1e9;
    cfg.batch = 1;  // successive one-sample steps conflict and blow up
    cfg.seed = 1;
    bool threw = false;
    try {
        train(build(s, 1), data, iota_idx(0, 12), iota_idx(12, 16),
              LabelKind::class_label, cfg);
    } catch (const TrainingError& e) {
        threw = true;
        CHECK(e.epoch < cfg.epochs);
    }
    CHECK(threw);
}

TEST_CASE("invalid specs are rejected") {
    ModelSpec s = reduced_spec(Family::recurrent_encoder, Head::relu_only);
    s.encoder_dim = 3;  // < n_classes = 4
    CHECK_THROWS_AS(build(s, 1), SpecError);
    ModelSpec k = reduced_spec(Family::channelwise_cnn, Head::direct);
    k.kernel = 64;  // longer than the input
    CHECK_THROWS_AS(build(k, 1), SpecError);
    ModelSpec c = reduced_spec(Family::linear_softmax, Head::direct);
    c.n_classes = 1;
    CHECK_THROWS_AS(build(c, 1), SpecError);
    CHECK_THROWS_AS(family_from_name("mlp"), SpecError);
    CHECK_THROWS_AS(head_from_name("relu"), SpecError);
    CHECK(family_from_name(family_name(Family::pooled_cnn)) ==
          Family::pooled_cnn);
    CHECK(head_from_name(head_name(Head::relu_fc40)) == Head::relu_fc40);
}

TEST_CASE("label_of enforces label-kind semantics") {
    Segment blank;
    blank.samples = Mat(1, 1);
    blank.class_label = kBlankLabel;
    blank.block_index = 7;
    CHECK_THROWS_AS(label_of(blank, LabelKind::class_label), DataError);
    CHECK(label_of(blank, LabelKind::block_label) == 7);
    CHECK_THROWS_AS(label_of(blank, LabelKind::blank_pair), SpecError);
    CHECK(label_kind_from_name("class") == LabelKind::class_label);
    CHECK(label_kind_from_name("blank-pair") == LabelKind::blank_pair);
    CHECK_THROWS_AS(label_kind_from_name("image"), SpecError);
}

TEST_CASE("channelwise trunk outperforms pooled on single-channel drift") {
    // One channel carries a block-correlated DC offset; everything else is
    // noise. Per-channel convolutions can latch onto that channel, while
    // all-channel convolutions dilute it at the first layer.
    const std::size_t C = 16, T = 64;
    const int n_blocks = 4;
    double mean_cw = 0.0, mean_pl = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        DetRng rng(900 + seed);
        std::vector<Segment> data;
        const double offsets[n_blocks] = {2.0, -2.0, 1.0, -1.0};
        for (int b = 0; b < n_blocks; ++b)
            for (int k = 0; k < 24; ++k) {
                Mat x(C, T);
                for (auto& v : x.v) v = rng.normal();
                for (std::size_t t = 0; t < T; ++t) x(0, t) += offsets[b];
                Segment s;
                s.samples = std::move(x);
                s.class_label = b;
                s.block_index = static_cast<std::uint32_t>(b);
                data.push_back(std::move(s));
            }
        // Stable ordering: 16 train / 4 val / 4 test per block.
        std::vector<std::size_t> train_idx, val_idx, test_idx;
        for (std::size_t i = 0; i < data.size(); ++i) {
            std::size_t within = i % 24;
            (within < 16 ? train_idx : within < 20 ? val_idx : test_idx)
                .push_back(i);
        }
        TrainConfig cfg;
        cfg.epochs = 30;
        cfg.seed = 40 + seed;
        for (Family fam : {Family::channelwise_cnn, Family::pooled_cnn}) {
            ModelSpec s;
            s.family = fam;
            s.head = Head::direct;
            s.n_channels = C;
            s.input_len = T;
            s.n_classes = n_blocks;
            TrainedModel m = train(build(s, 50 + seed), data, train_idx,
                                   val_idx, LabelKind::block_label, cfg);
            double acc = evaluate(m, data, test_idx, LabelKind::block_label);
            (fam == Family::channelwise_cnn ? mean_cw : mean_pl) += acc / 5.0;
        }
    }
    CHECK(mean_cw > mean_pl);
}
