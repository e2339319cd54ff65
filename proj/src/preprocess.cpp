#include "wlc/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "wlc/error.hpp"

namespace wlc::preprocess {

double normalize_s1(double db) {
    if (!std::isfinite(db)) throw DataError("normalize_s1: non-finite input");
    const double clipped = std::clamp(db, kS1MinDb, kS1MaxDb);
    return (clipped - kS1MinDb) / (kS1MaxDb - kS1MinDb);
}

double normalize_s2(double dn) {
    if (!std::isfinite(dn)) throw DataError("normalize_s2: non-finite input");
    return std::clamp(dn, 0.0, kS2MaxDn) / kS2MaxDn;
}

double denormalize_s1(double unit) { return unit * (kS1MaxDb - kS1MinDb) + kS1MinDb; }

double denormalize_s2(double unit) { return unit * kS2MaxDn; }

BandStack select_surface_bands(const BandStack& s2) {
    const auto& surface = s2_surface_band_names();
    if (s2.band_names == surface) return s2;
    if (s2.band_count() != s2_all_band_names().size()) {
        throw DataError("select_surface_bands expects 13 or 10 Sentinel-2 bands, got " +
                        std::to_string(s2.band_count()));
    }
    BandStack out(s2.height, s2.width, surface);
    for (std::size_t b = 0; b < surface.size(); ++b) {
        const auto src = s2.find(surface[b]);
        if (!src) throw DataError("Sentinel-2 stack is missing band " + surface[b]);
        const auto from = s2.band(*src);
        std::copy(from.begin(), from.end(), out.band(b).begin());
    }
    for (const auto& name : s2.band_names) {
        if (name != "B1" && name != "B9" && name != "B10" && !out.find(name)) {
            throw DataError("unknown Sentinel-2 band name '" + name + "'");
        }
    }
    return out;
}

std::string to_string(Fusion mode) { return mode == Fusion::S2Only ? "s2" : "s1s2"; }

Fusion parse_fusion(const std::string& text) {
    if (text == "s2") return Fusion::S2Only;
    if (text == "s1s2") return Fusion::S1PlusS2;
    throw DataError("unknown fusion mode '" + text + "' (expected s2 or s1s2)");
}

FeatureOrigin FeatureMatrix::origin(std::size_t r) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), r,
                               [](std::size_t row, const Segment& s) { return row < s.first_row; });
    if (it == segments.begin() || r >= rows()) throw DataError("feature row out of range");
    --it;
    return FeatureOrigin{it->patch_id, r - it->first_row};
}

void FeatureMatrix::append(const FeatureMatrix& other) {
    if (rows() == 0 && segments.empty()) dim = other.dim;
    if (other.dim != dim) throw DataError("cannot append feature matrices of different dimension");
    const std::size_t base = rows();
    values.insert(values.end(), other.values.begin(), other.values.end());
    valid.insert(valid.end(), other.valid.begin(), other.valid.end());
    finite.insert(finite.end(), other.finite.begin(), other.finite.end());
    for (auto seg : other.segments) {
        seg.first_row += base;
        segments.push_back(std::move(seg));
    }
}

FeatureMatrix assemble_features(const Patch& patch, const FusionConfig& config) {
    const bool fused = config.mode == Fusion::S1PlusS2;
    if (fused && !patch.s1) {
        throw DataError("patch '" + patch.id + "' has no Sentinel-1 stack, required for s1s2 fusion");
    }
    const BandStack s2 = select_surface_bands(patch.s2);
    const std::size_t n = patch.pixel_count();
    if (s2.plane_size() != n || (fused && patch.s1->plane_size() != n)) {
        throw DataError("patch '" + patch.id + "' has band stacks of a different size than its labels");
    }

    FeatureMatrix fm;
    fm.dim = config.dim();
    fm.values.assign(n * fm.dim, 0.0f);
    fm.valid.assign(n, 1);
    fm.finite.assign(n, 1);
    fm.segments.push_back({patch.id, 0, n});

    auto put = [&](std::size_t pixel, std::size_t col, float raw, double (*norm)(double)) {
        if (!std::isfinite(raw)) {
            fm.finite[pixel] = 0;
            fm.valid[pixel] = 0;
            return;
        }
        fm.values[pixel * fm.dim + col] = static_cast<float>(norm(raw));
    };

    for (std::size_t b = 0; b < s2.band_count(); ++b) {
        const auto plane = s2.band(b);
        for (std::size_t p = 0; p < n; ++p) put(p, b, plane[p], normalize_s2);
    }
    if (fused) {
        for (std::size_t b = 0; b < 2; ++b) {
            const auto plane = patch.s1->band(b);
            for (std::size_t p = 0; p < n; ++p) put(p, 10 + b, plane[p], normalize_s1);
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (patch.lr_labels.values[p] == kNoData) fm.valid[p] = 0;
    }
    // a pixel with any non-finite source carries no usable features
    for (std::size_t p = 0; p < n; ++p) {
        if (!fm.finite[p]) std::fill_n(fm.values.begin() + static_cast<std::ptrdiff_t>(p * fm.dim), fm.dim, 0.0f);
    }
    return fm;
}

FeatureMatrix assemble_features(std::span<const Patch> patches, const FusionConfig& config) {
    FeatureMatrix all;
    all.dim = config.dim();
    for (const auto& p : patches) all.append(assemble_features(p, config));
    return all;
}

} // namespace wlc::preprocess
