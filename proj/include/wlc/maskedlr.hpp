#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "wlc/preprocess.hpp"

namespace wlc::maskedlr {

struct LossResult {
    double loss = 0.0;
    std::vector<double> gradient; // d loss / d logits, N x K
};

// Mean softmax cross-entropy over mask-true rows. Labels are class ids
// 1..K. Rows with mask false contribute nothing and get a zero gradient.
// Throws DataError when no row is masked in.
LossResult masked_ce_loss(std::span<const double> logits, std::size_t classes,
                          std::span<const std::uint8_t> labels, std::span<const std::uint8_t> mask);

struct LogRegConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 50;
    std::size_t batch_size = 4096;
    std::uint64_t seed = 0;
};

struct LogRegModel {
    std::size_t classes = kNumClasses;
    std::size_t dim = 0;
    std::vector<float> weights; // classes x dim
    std::vector<float> bias;    // classes
    LogRegConfig config;
    std::size_t selected_epoch = 0; // 0 = initialisation

    std::vector<double> logits(std::span<const float> x) const;
};

// A labelled evaluation split used for checkpoint selection.
struct EvalSet {
    const preprocess::FeatureMatrix* features = nullptr;
    std::span<const std::uint8_t> reference;
    std::span<const std::uint8_t> mask;
};

enum class Selection { Holdout, Test };

struct EpochRecord {
    std::size_t epoch = 0;
    double loss = 0.0;
    std::optional<double> holdout_aa;
    std::optional<double> test_aa;
};

struct LogRegFit {
    LogRegModel model;
    std::vector<EpochRecord> curve;
};

// Mini-batch gradient descent from all-zero parameters. Without an
// evaluation set for `select` the last epoch is returned; otherwise the
// epoch with the best AA on that set (earliest on ties).
LogRegFit logreg_fit(const preprocess::FeatureMatrix& features, std::span<const std::uint8_t> labels,
                     std::span<const std::uint8_t> mask, const LogRegConfig& config,
                     const EvalSet* holdout = nullptr, const EvalSet* test = nullptr,
                     Selection select = Selection::Holdout);

// argmax of W x + b, lowest class id on ties; Savanna is skipped unless
// `allow_savanna`. Rows with non-finite sources are no-data.
std::vector<std::uint8_t> logreg_predict(const LogRegModel& model, const preprocess::FeatureMatrix& features,
                                         bool allow_savanna = false);
std::uint8_t logreg_predict_one(const LogRegModel& model, std::span<const float> x, bool allow_savanna = false);

// epoch,loss,holdout_aa[,test_aa]
void write_curve_csv(std::ostream& out, const std::vector<EpochRecord>& curve);

} // namespace wlc::maskedlr
