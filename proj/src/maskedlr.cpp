#include "wlc/maskedlr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wlc/error.hpp"
#include "wlc/metrics.hpp"
#include "wlc/rng.hpp"

namespace wlc::maskedlr {
namespace {

// In-place softmax; returns log-sum-exp of the input.
double softmax(std::span<double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return m + std::log(sum);
}

void check_label(std::uint8_t label, std::size_t classes, std::size_t row) {
    if (label == 0 || label > classes) {
        throw DataError("masked row " + std::to_string(row) + " has label " + std::to_string(label) +
                        " outside 1.." + std::to_string(classes));
    }
}

double evaluate_aa(const LogRegModel& model, const EvalSet& set) {
    const auto& fm = *set.features;
    if (set.reference.size() != fm.rows() || set.mask.size() != fm.rows()) {
        throw DataError("evaluation set: reference/mask length does not match the feature rows");
    }
    const auto pred = logreg_predict(model, fm);
    return metrics::report(metrics::confusion(set.reference, pred, set.mask)).aa;
}

} // namespace

LossResult masked_ce_loss(std::span<const double> logits, std::size_t classes,
                          std::span<const std::uint8_t> labels, std::span<const std::uint8_t> mask) {
    if (classes == 0 || logits.size() != labels.size() * classes || mask.size() != labels.size()) {
        throw DataError("masked_ce_loss: logits, labels and mask differ in shape");
    }
    const std::size_t n = labels.size();
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) m += mask[i] ? 1 : 0;
    if (m == 0) throw DataError("masked_ce_loss: every pixel is masked out");

    LossResult out;
    out.gradient.assign(logits.size(), 0.0);
    std::vector<double> z(classes);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        check_label(labels[i], classes, i);
        std::copy_n(logits.begin() + static_cast<std::ptrdiff_t>(i * classes), classes, z.begin());
        const std::size_t y = labels[i] - 1u;
        const double target_logit = z[y];
        const double lse = softmax(z);
        out.loss += (lse - target_logit) * inv_m;
        for (std::size_t c = 0; c < classes; ++c) {
            out.gradient[i * classes + c] = (z[c] - (c == y ? 1.0 : 0.0)) * inv_m;
        }
    }
    return out;
}

std::vector<double> LogRegModel::logits(std::span<const float> x) const {
    if (x.size() != dim) {
        throw DataError("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                        std::to_string(dim));
    }
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        double s = bias[c];
        for (std::size_t j = 0; j < dim; ++j) s += static_cast<double>(weights[c * dim + j]) * x[j];
        z[c] = s;
    }
    return z;
}

LogRegFit logreg_fit(const preprocess::FeatureMatrix& features, std::span<const std::uint8_t> labels,
                     std::span<const std::uint8_t> mask, const LogRegConfig& config, const EvalSet* holdout,
                     const EvalSet* test, Selection select) {
    const std::size_t n = features.rows();
    const std::size_t d = features.dim;
    const std::size_t k = kNumClasses;
    if (labels.size() != n || mask.size() != n) {
        throw DataError("logreg_fit: labels/mask length does not match the feature rows");
    }
    if (config.batch_size == 0) throw DataError("logreg_fit: batch size must be positive");
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        throw DataError("logreg_fit: learning rate must be a positive finite number");
    }
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n; ++r) {
        if (mask[r] && features.finite[r]) {
            check_label(labels[r], k, r);
            rows.push_back(r);
        }
    }
    if (rows.empty()) throw DataError("logreg_fit: no mask-true pixels to train on");

    std::vector<double> w(k * d, 0.0), b(k, 0.0);
    auto snapshot = [&](std::size_t epoch) {
        LogRegModel m;
        m.classes = k;
        m.dim = d;
        m.config = config;
        m.selected_epoch = epoch;
        m.weights.assign(w.begin(), w.end());
        m.bias.assign(b.begin(), b.end());
        return m;
    };

    const EvalSet* selector = select == Selection::Holdout ? holdout : test;
    LogRegFit fit;
    fit.model = snapshot(0);
    double best_aa = -1.0;

    Rng rng(config.seed);
    std::vector<double> gw(k * d), gb(k), z(k);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.uniform_index(i)]);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < rows.size(); start += config.batch_size) {
            const std::size_t end = std::min(rows.size(), start + config.batch_size);
            const double inv_m = 1.0 / static_cast<double>(end - start);
            std::fill(gw.begin(), gw.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t t = start; t < end; ++t) {
                const std::size_t r = rows[t];
                const auto x = features.row(r);
                for (std::size_t c = 0; c < k; ++c) {
                    double s = b[c];
                    for (std::size_t j = 0; j < d; ++j) s += w[c * d + j] * x[j];
                    z[c] = s;
                }
                const std::size_t y = labels[r] - 1u;
                const double target_logit = z[y];
                batch_loss += softmax(z) - target_logit;
                for (std::size_t c = 0; c < k; ++c) {
                    const double g = z[c] - (c == y ? 1.0 : 0.0);
                    gb[c] += g;
                    for (std::size_t j = 0; j < d; ++j) gw[c * d + j] += g * x[j];
                }
            }
            if (!std::isfinite(batch_loss)) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "non-finite loss at epoch %zu, batch starting at %zu (learning rate %g)", epoch,
                              start, config.learning_rate);
                throw TrainingError(msg);
            }
            loss_sum += batch_loss;
            const double step = config.learning_rate * inv_m;
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * gw[i];
            for (std::size_t c = 0; c < k; ++c) b[c] -= step * gb[c];
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = loss_sum / static_cast<double>(rows.size());
        LogRegModel current = snapshot(epoch);
        for (double v : current.weights) {
            if (!std::isfinite(v)) throw TrainingError("parameters diverged at epoch " + std::to_string(epoch));
        }
        if (holdout) rec.holdout_aa = evaluate_aa(current, *holdout);
        if (test) rec.test_aa = evaluate_aa(current, *test);
        fit.curve.push_back(rec);

        if (selector) {
            const double aa = select == Selection::Holdout ? *rec.holdout_aa : *rec.test_aa;
            if (aa > best_aa) {
                best_aa = aa;
                fit.model = std::move(current);
            }
        } else {
            fit.model = std::move(current);
        }
    }
    return fit;
}

std::uint8_t logreg_predict_one(const LogRegModel& model, std::span<const float> x, bool allow_savanna) {
    const auto z = model.logits(x);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < model.classes; ++c) {
        if (!allow_savanna && c + 1 == kSavanna) continue;
        if (best == std::numeric_limits<std::size_t>::max() || z[c] > z[best]) best = c;
    }
    return static_cast<std::uint8_t>(best + 1);
}

std::vector<std::uint8_t> logreg_predict(const LogRegModel& model, const preprocess::FeatureMatrix& features,
                                         bool allow_savanna) {
    if (features.dim != model.dim) {
        throw DataError("feature dimension " + std::to_string(features.dim) + " does not match model dimension " +
                        std::to_string(model.dim));
    }
    std::vector<std::uint8_t> out(features.rows(), kNoData);
    for (std::size_t r = 0; r < features.rows(); ++r) {
        if (features.finite[r]) out[r] = logreg_predict_one(model, features.row(r), allow_savanna);
    }
    return out;
}

void write_curve_csv(std::ostream& out, const std::vector<EpochRecord>& curve) {
    const bool with_test = std::any_of(curve.begin(), curve.end(), [](const auto& r) { return r.test_aa.has_value(); });
    out << "epoch,loss,holdout_aa" << (with_test ? ",test_aa" : "") << '\n';
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto& r : curve) {
        out << r.epoch << ',' << num(r.loss) << ',' << (r.holdout_aa ? num(*r.holdout_aa) : "");
        if (with_test) out << ',' << (r.test_aa ? num(*r.test_aa) : "");
        out << '\n';
    }
}

} // namespace wlc::maskedlr
