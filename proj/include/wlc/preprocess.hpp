#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wlc/types.hpp"

namespace wlc::preprocess {

inline constexpr double kS1MinDb = -25.0;
inline constexpr double kS1MaxDb = 0.0;
inline constexpr double kS2MaxDn = 10000.0;

// Clip backscatter to [-25, 0] dB and map linearly onto [0, 1].
double normalize_s1(double db);
// Clip top-of-atmosphere digital numbers to [0, 1e4] and map onto [0, 1].
double normalize_s2(double dn);

// Inverses on [0, 1]; used by the synthetic generator to store raw units.
double denormalize_s1(double unit);
double denormalize_s2(double unit);

// Drops B1, B9 and B10 from a 13-band stack; a 10-band surface stack is
// returned unchanged.
BandStack select_surface_bands(const BandStack& s2);

enum class Fusion : std::uint8_t {
    S2Only = 1,
    S1PlusS2 = 2,
};

struct FusionConfig {
    Fusion mode = Fusion::S1PlusS2;

    std::size_t dim() const { return mode == Fusion::S2Only ? 10 : 12; }
};

std::string to_string(Fusion mode);
Fusion parse_fusion(const std::string& text); // "s2" | "s1s2"

struct FeatureOrigin {
    std::string patch_id;
    std::size_t pixel = 0;
};

// Row-major per-pixel features. `valid` is false where a source sample was
// non-finite or the LR label is no-data; `finite` only tracks the former.
struct FeatureMatrix {
    struct Segment {
        std::string patch_id;
        std::size_t first_row = 0;
        std::size_t rows = 0;
    };

    std::size_t dim = 0;
    std::vector<float> values;
    std::vector<std::uint8_t> valid;
    std::vector<std::uint8_t> finite;
    std::vector<Segment> segments;

    std::size_t rows() const { return valid.size(); }
    std::span<const float> row(std::size_t r) const {
        return std::span<const float>(values).subspan(r * dim, dim);
    }
    FeatureOrigin origin(std::size_t r) const;

    // Concatenates another matrix of the same dimension.
    void append(const FeatureMatrix& other);
};

FeatureMatrix assemble_features(const Patch& patch, const FusionConfig& config);

// assemble_features over several patches, concatenated in order.
FeatureMatrix assemble_features(std::span<const Patch> patches, const FusionConfig& config);

} // namespace wlc::preprocess
