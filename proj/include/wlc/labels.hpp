#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wlc/types.hpp"

namespace wlc::labels {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// IGBP (17 classes) to simplified (10 classes) aggregation with the class
// names and rendering colours of the simplified scheme.
struct SchemeMap {
    std::array<std::uint8_t, kNumIgbpClasses + 1> table{}; // index 0 is no-data
    std::array<std::string_view, kNumClasses> class_names{};
    std::array<std::string_view, kNumClasses> palette_hex{};
    std::array<Rgb, kNumClasses> palette{};

    std::string_view name(std::uint8_t simplified_id) const { return class_names[simplified_id - 1]; }
};

const SchemeMap& scheme_map();

// Serialises the scheme map (table, names, palette) for documentation.
std::string scheme_map_json();

// Element-wise IGBP17 -> SIMPLIFIED10 lookup; 0 stays 0. Throws DataError
// if the raster is not tagged IGBP17 or holds an id above 17.
LabelRaster simplify_igbp(const LabelRaster& raster);

// simplify_igbp for IGBP17 input, copy for SIMPLIFIED10 input.
LabelRaster as_simplified(const LabelRaster& raster);

// true where the label is valid and not in `masked_classes`.
std::vector<std::uint8_t> trainable_mask(const LabelRaster& raster,
                                         const ClassSet& masked_classes = savanna_only());

LabelRaster upsample_nearest(const LabelRaster& raster, std::uint32_t factor);

// Block majority vote over factor x factor blocks; no-data pixels do not
// vote, ties go to the lowest class id, all-no-data blocks stay 0.
LabelRaster downsample_majority(const LabelRaster& raster, std::uint32_t factor);

} // namespace wlc::labels
