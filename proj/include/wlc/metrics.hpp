#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wlc/types.hpp"

namespace wlc::metrics {

// K x K counts, rows = reference class, columns = predicted class.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

    void add(std::uint8_t reference, std::uint8_t predicted) { ++counts[reference - 1][predicted - 1]; }
    std::uint64_t total() const;
    std::uint64_t row_sum(std::size_t r) const;
    std::uint64_t col_sum(std::size_t c) const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    bool operator==(const ConfusionMatrix&) const = default;
};

// Counts pixels where eval_mask is set. Pixels whose reference or
// prediction is no-data are always skipped.
ConfusionMatrix confusion(std::span<const std::uint8_t> reference, std::span<const std::uint8_t> prediction,
                          std::span<const std::uint8_t> eval_mask);

// Policy form: evaluates every pixel whose reference class is valid and not
// in `excluded_reference` (Savanna by default).
ConfusionMatrix confusion(const LabelRaster& reference, const LabelRaster& prediction,
                          const ClassSet& excluded_reference = savanna_only());

struct MetricsReport {
    std::array<std::optional<double>, kNumClasses> producers_accuracy{}; // nullopt = absent class
    std::array<std::optional<double>, kNumClasses> iou{};
    std::array<std::uint64_t, kNumClasses> support{};
    double aa = 0.0;
    double oa = 0.0;
    double miou = 0.0;
    std::uint64_t pixels = 0;

    bool present(std::size_t class_index) const { return support[class_index] > 0; }
};

// Producer's accuracy, IoU, AA and mIoU over present classes; OA over all
// evaluated pixels. Throws DataError on an empty matrix.
MetricsReport report(const ConfusionMatrix& cm);

// probs[l][h] = P(HR = h | LR = l); rows without support are zero.
struct TransitionMatrix {
    std::array<std::array<double, kNumClasses>, kNumClasses> probs{};
    std::array<std::uint64_t, kNumClasses> row_support{};

    bool supported(std::size_t lr_index) const { return row_support[lr_index] > 0; }
};

TransitionMatrix transition_from_counts(const ConfusionMatrix& joint);

// Joint LR x HR histogram over pixels where both labels are valid.
ConfusionMatrix joint_counts(const LabelRaster& lr, const LabelRaster& hr);

TransitionMatrix transition_matrix(const LabelRaster& lr, const LabelRaster& hr);

// Aggregated over patches; every patch must carry HR labels.
TransitionMatrix transition_matrix(std::span<const Patch> patches);

struct Evaluation {
    ConfusionMatrix confusion;
    MetricsReport report;
};

// LR labels scored as predictions against the HR reference, one confusion
// matrix accumulated over all patches.
Evaluation lr_vs_hr_eval(std::span<const Patch> patches, const ClassSet& excluded_reference = savanna_only());

// class,name,producers_acc,iou,support
void write_report_csv(std::ostream& out, const MetricsReport& r);
// {"aa":..,"oa":..,"miou":..,"pixels":..}
std::string summary_json(const MetricsReport& r);
void write_matrix_csv(std::ostream& out, const ConfusionMatrix& cm);
void write_matrix_csv(std::ostream& out, const TransitionMatrix& tm);

} // namespace wlc::metrics
