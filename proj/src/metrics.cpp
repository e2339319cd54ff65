#include "wlc/metrics.hpp"

#include <cstdio>

#include "json.hpp"
#include "wlc/error.hpp"
#include "wlc/labels.hpp"

namespace wlc::metrics {
namespace {

void check_same_shape(const LabelRaster& a, const LabelRaster& b) {
    if (a.height != b.height || a.width != b.width || a.values.size() != b.values.size()) {
        throw DataError("label rasters differ in shape (" + std::to_string(a.height) + "x" +
                        std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                        std::to_string(b.width) + ")");
    }
}

void check_id(std::uint8_t v, const char* what) {
    if (v > kNumClasses) throw DataError(std::string(what) + " holds illegal class id " + std::to_string(v));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (auto c : row) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t r) const {
    std::uint64_t t = 0;
    for (auto c : counts[r]) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t c) const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t += row[c];
    return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    for (std::size_t r = 0; r < kNumClasses; ++r)
        for (std::size_t c = 0; c < kNumClasses; ++c) counts[r][c] += other.counts[r][c];
    return *this;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> reference, std::span<const std::uint8_t> prediction,
                          std::span<const std::uint8_t> eval_mask) {
    if (reference.size() != prediction.size() || reference.size() != eval_mask.size()) {
        throw DataError("confusion: reference, prediction and mask differ in length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const std::uint8_t r = reference[i];
        const std::uint8_t p = prediction[i];
        check_id(r, "reference");
        check_id(p, "prediction");
        if (!eval_mask[i] || r == kNoData || p == kNoData) continue;
        cm.add(r, p);
    }
    return cm;
}

ConfusionMatrix confusion(const LabelRaster& reference, const LabelRaster& prediction,
                          const ClassSet& excluded_reference) {
    check_same_shape(reference, prediction);
    const LabelRaster ref = labels::as_simplified(reference);
    const LabelRaster pred = labels::as_simplified(prediction);
    const auto mask = labels::trainable_mask(ref, excluded_reference);
    return confusion(ref.values, pred.values, mask);
}

MetricsReport report(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.pixels = cm.total();
    if (r.pixels == 0) throw DataError("cannot report metrics over zero evaluated pixels");

    std::uint64_t diagonal = 0;
    double pa_sum = 0.0, iou_sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const std::uint64_t tp = cm.counts[c][c];
        const std::uint64_t row = cm.row_sum(c);
        const std::uint64_t col = cm.col_sum(c);
        diagonal += tp;
        r.support[c] = row;
        if (row == 0) continue;
        const double pa = static_cast<double>(tp) / static_cast<double>(row);
        const double iou = static_cast<double>(tp) / static_cast<double>(row + col - tp);
        r.producers_accuracy[c] = pa;
        r.iou[c] = iou;
        pa_sum += pa;
        iou_sum += iou;
        ++present;
    }
    r.aa = pa_sum / static_cast<double>(present);
    r.miou = iou_sum / static_cast<double>(present);
    r.oa = static_cast<double>(diagonal) / static_cast<double>(r.pixels);
    return r;
}

TransitionMatrix transition_from_counts(const ConfusionMatrix& joint) {
    TransitionMatrix tm;
    for (std::size_t l = 0; l < kNumClasses; ++l) {
        const std::uint64_t support = joint.row_sum(l);
        tm.row_support[l] = support;
        if (support == 0) continue;
        for (std::size_t h = 0; h < kNumClasses; ++h) {
            tm.probs[l][h] = static_cast<double>(joint.counts[l][h]) / static_cast<double>(support);
        }
    }
    return tm;
}

ConfusionMatrix joint_counts(const LabelRaster& lr, const LabelRaster& hr) {
    check_same_shape(lr, hr);
    const LabelRaster l = labels::as_simplified(lr);
    const LabelRaster h = labels::as_simplified(hr);
    ConfusionMatrix joint;
    for (std::size_t i = 0; i < l.values.size(); ++i) {
        check_id(l.values[i], "lr");
        check_id(h.values[i], "hr");
        if (l.values[i] == kNoData || h.values[i] == kNoData) continue;
        joint.add(l.values[i], h.values[i]);
    }
    return joint;
}

TransitionMatrix transition_matrix(const LabelRaster& lr, const LabelRaster& hr) {
    const auto joint = joint_counts(lr, hr);
    if (joint.total() == 0) throw DataError("transition_matrix: no jointly valid pixels");
    return transition_from_counts(joint);
}

TransitionMatrix transition_matrix(std::span<const Patch> patches) {
    ConfusionMatrix joint;
    for (const auto& p : patches) {
        if (!p.hr_labels) throw DataError("patch '" + p.id + "' has no high-resolution labels");
        joint += joint_counts(p.lr_labels, *p.hr_labels);
    }
    if (joint.total() == 0) throw DataError("transition_matrix: no jointly valid pixels");
    return transition_from_counts(joint);
}

Evaluation lr_vs_hr_eval(std::span<const Patch> patches, const ClassSet& excluded_reference) {
    if (patches.empty()) throw DataError("lr_vs_hr_eval needs at least one patch");
    Evaluation ev;
    for (const auto& p : patches) {
        if (!p.hr_labels) throw DataError("patch '" + p.id + "' has no high-resolution labels");
        ev.confusion += confusion(*p.hr_labels, p.lr_labels, excluded_reference);
    }
    ev.report = report(ev.confusion);
    return ev;
}

void write_report_csv(std::ostream& out, const MetricsReport& r) {
    const auto& names = labels::scheme_map().class_names;
    out << "class,name,producers_acc,iou,support\n";
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        out << c + 1 << ',' << names[c] << ',';
        out << (r.producers_accuracy[c] ? fmt(*r.producers_accuracy[c]) : "-") << ',';
        out << (r.iou[c] ? fmt(*r.iou[c]) : "-") << ',';
        out << r.support[c] << '\n';
    }
}

std::string summary_json(const MetricsReport& r) {
    nlohmann::ordered_json doc;
    doc["aa"] = r.aa;
    doc["oa"] = r.oa;
    doc["miou"] = r.miou;
    doc["pixels"] = r.pixels;
    return doc.dump(2) + "\n";
}

namespace {

void write_header(std::ostream& out, const char* corner, bool with_support) {
    out << corner;
    for (auto name : labels::scheme_map().class_names) out << ',' << name;
    if (with_support) out << ",support";
    out << '\n';
}

} // namespace

void write_matrix_csv(std::ostream& out, const ConfusionMatrix& cm) {
    const auto& names = labels::scheme_map().class_names;
    write_header(out, "reference\\predicted", false);
    for (std::size_t r = 0; r < kNumClasses; ++r) {
        out << names[r];
        for (auto v : cm.counts[r]) out << ',' << v;
        out << '\n';
    }
}

void write_matrix_csv(std::ostream& out, const TransitionMatrix& tm) {
    const auto& names = labels::scheme_map().class_names;
    write_header(out, "lr\\hr", true);
    for (std::size_t l = 0; l < kNumClasses; ++l) {
        out << names[l];
        for (auto v : tm.probs[l]) out << ',' << fmt(v);
        out << ',' << tm.row_support[l] << '\n';
    }
}

} // namespace wlc::metrics
