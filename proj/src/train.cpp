#include "eeglab/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "eeglab/rng.hpp"

namespace eeglab {

std::string label_kind_name(LabelKind k) {
    switch (k) {
        case LabelKind::class_label: return "class";
        case LabelKind::block_label: return "block";
        case LabelKind::blank_pair: return "blank-pair";
    }
    throw SpecError("bad label kind");
}

LabelKind label_kind_from_name(const std::string& s) {
    if (s == "class") return LabelKind::class_label;
    if (s == "block") return LabelKind::block_label;
    if (s == "blank-pair") return LabelKind::blank_pair;
    throw SpecError("unknown label kind: " + s);
}

int label_of(const Segment& seg, LabelKind kind) {
    switch (kind) {
        case LabelKind::class_label:
            if (seg.is_blank())
                throw DataError("blank segment has no class label");
            return seg.class_label;
        case LabelKind::block_label:
            return static_cast<int>(seg.block_index);
        case LabelKind::blank_pair:
            throw SpecError("blank-pair is an evaluation-only label kind");
    }
    throw SpecError("bad label kind");
}

namespace {

int argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[best]) best = k;
    return static_cast<int>(best);
}

}  // namespace

TrainedModel train(TrainedModel model, const std::vector<Segment>& data,
                   const std::vector<std::size_t>& train_idx,
                   const std::vector<std::size_t>& val_idx, LabelKind kind,
                   const TrainConfig& cfg) {
    if (train_idx.empty()) throw SpecError("empty training set");
    if (!(cfg.lr > 0.0)) throw SpecError("learning rate must be positive");
    if (cfg.batch < 1) throw SpecError("batch size must be >= 1");
    const std::size_t Kc = model.spec.n_classes;
    for (std::size_t i : train_idx) {
        int y = label_of(data[i], kind);
        if (y < 0 || static_cast<std::size_t>(y) >= Kc)
            throw SpecError("training label out of range");
    }

    const std::size_t n_params = model.params.size();
    std::vector<double> grad(n_params, 0.0), m1(n_params, 0.0),
        m2(n_params, 0.0);
    std::vector<std::size_t> order = train_idx;
    DetRng shuffle_rng(derive_seed(cfg.seed, 0x5aff1eULL));
    ModelWorkspace ws;

    model.history.clear();
    std::vector<double> best_params = model.params;
    double best_val = -1.0, lowest_val = 2.0;
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t at = 0; at < order.size(); at += cfg.batch) {
            std::size_t bsz = std::min(cfg.batch, order.size() - at);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = 0; b < bsz; ++b) {
                const Segment& seg = data[order[at + b]];
                int y = label_of(seg, kind);
                double loss = loss_and_grad(model.spec, model.params,
                                            seg.samples, y, ws, grad);
                if (!std::isfinite(loss))
                    throw TrainingError("non-finite loss", epoch);
                loss_sum += loss;
                if (argmax(ws.logits) == y) ++correct;
            }
            double inv = 1.0 / static_cast<double>(bsz);
            ++step;
            double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < n_params; ++i) {
                double g = grad[i] * inv;
                m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * g;
                m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * g * g;
                double mh = m1[i] / bc1, vh = m2[i] / bc2;
                model.params[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
                if (!std::isfinite(model.params[i]))
                    throw TrainingError("non-finite parameter", epoch);
            }
        }
        EpochStats st;
        st.train_loss = loss_sum / static_cast<double>(order.size());
        st.train_acc =
            static_cast<double>(correct) / static_cast<double>(order.size());
        st.val_acc =
            val_idx.empty() ? 0.0 : evaluate(model, data, val_idx, kind);
        model.history.push_back(st);
        if (st.val_acc > best_val) {
            best_val = st.val_acc;
            best_params = model.params;
            model.checkpoint_epoch = epoch;
        }
        if (st.val_acc < lowest_val) {
            lowest_val = st.val_acc;
            model.lowest_val_epoch = epoch;
        }
    }
    model.params = std::move(best_params);
    model.trained = true;
    return model;
}

double evaluate(const TrainedModel& m, const std::vector<Segment>& data,
                const std::vector<std::size_t>& idx, LabelKind kind) {
    if (idx.empty()) throw EvalError("nothing to evaluate");
    ModelWorkspace ws;
    std::size_t correct = 0;
    for (std::size_t i : idx) {
        const Segment& seg = data[i];
        forward(m.spec, m.params, seg.samples, ws);
        int pred = argmax(ws.logits);
        if (kind == LabelKind::blank_pair) {
            if (!seg.blank_neighbors)
                throw DataError("blank segment lacks neighbour labels");
            auto [prev, next] = *seg.blank_neighbors;
            if (pred == prev || pred == next) ++correct;
        } else {
            if (pred == label_of(seg, kind)) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(idx.size());
}

double evaluate(const TrainedModel& m, const std::vector<Segment>& segs,
                LabelKind kind) {
    std::vector<std::size_t> idx(segs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return evaluate(m, segs, idx, kind);
}

double chance_level(const ModelSpec& spec, LabelKind kind) {
    double k = static_cast<double>(spec.n_classes);
    return kind == LabelKind::blank_pair ? 2.0 / k : 1.0 / k;
}

void write_history_csv(const std::string& path, const TrainedModel& m) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    os << "epoch,train_loss,train_acc,val_acc\n";
    char buf[96];
    for (std::size_t e = 0; e < m.history.size(); ++e) {
        const auto& st = m.history[e];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", e,
                      st.train_loss, st.train_acc, st.val_acc);
        os << buf;
    }
}

}  // namespace eeglab
