#include "wlc/labels.hpp"

#include "json.hpp"

#include "wlc/error.hpp"

namespace wlc::labels {
namespace {

Rgb parse_hex(std::string_view hex) {
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        return static_cast<std::uint8_t>(c - 'a' + 10);
    };
    auto byte = [&](std::size_t i) {
        return static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
    };
    return Rgb{byte(0), byte(2), byte(4)};
}

SchemeMap build_scheme_map() {
    SchemeMap m;
    m.table = {0,
               1, 1, 1, 1, 1, // forests
               2, 2,          // shrublands
               3, 3,          // woody savannas, savannas
               4,             // grasslands
               5,             // permanent wetlands
               6,             // croplands
               7,             // urban and built-up
               6,             // cropland / natural vegetation mosaics
               8,             // snow and ice
               9,             // barren
               10};           // water bodies
    m.class_names = {"Forest", "Shrubland", "Savanna", "Grassland", "Wetlands",
                     "Croplands", "Urban/Built-up", "Snow/Ice", "Barren", "Water"};
    m.palette_hex = {"009900", "c6b044", "fbff13", "b6ff05", "27ff87",
                     "c24f44", "a5a5a5", "69fff8", "f9ffa4", "1c0dff"};
    for (std::size_t i = 0; i < kNumClasses; ++i) m.palette[i] = parse_hex(m.palette_hex[i]);
    return m;
}

void check_shape(const LabelRaster& raster) {
    if (raster.values.size() != static_cast<std::size_t>(raster.height) * raster.width) {
        throw DataError("label raster size does not match its height x width");
    }
}

} // namespace

const SchemeMap& scheme_map() {
    static const SchemeMap map = build_scheme_map();
    return map;
}

std::string scheme_map_json() {
    const auto& m = scheme_map();
    nlohmann::ordered_json doc;
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        nlohmann::ordered_json igbp = nlohmann::ordered_json::array();
        for (std::size_t g = 1; g <= kNumIgbpClasses; ++g) {
            if (m.table[g] == c + 1) igbp.push_back(g);
        }
        classes.push_back({{"id", c + 1},
                           {"name", m.class_names[c]},
                           {"color", m.palette_hex[c]},
                           {"igbp_ids", igbp}});
    }
    doc["scheme"] = "simplified-igbp";
    doc["classes"] = classes;
    return doc.dump(2) + "\n";
}

LabelRaster simplify_igbp(const LabelRaster& raster) {
    if (raster.scheme != Scheme::Igbp17) {
        throw DataError("simplify_igbp expects an IGBP17 raster");
    }
    check_shape(raster);
    const auto& table = scheme_map().table;
    LabelRaster out(raster.height, raster.width, Scheme::Simplified10);
    for (std::size_t i = 0; i < raster.values.size(); ++i) {
        const std::uint8_t v = raster.values[i];
        if (v > kNumIgbpClasses) {
            throw DataError("illegal IGBP class id " + std::to_string(v) + " at pixel " + std::to_string(i));
        }
        out.values[i] = table[v];
    }
    return out;
}

LabelRaster as_simplified(const LabelRaster& raster) {
    return raster.scheme == Scheme::Igbp17 ? simplify_igbp(raster) : raster;
}

std::vector<std::uint8_t> trainable_mask(const LabelRaster& raster, const ClassSet& masked_classes) {
    if (raster.scheme != Scheme::Simplified10) {
        throw DataError("trainable_mask expects a SIMPLIFIED10 raster");
    }
    std::vector<std::uint8_t> mask(raster.values.size());
    for (std::size_t i = 0; i < raster.values.size(); ++i) {
        const std::uint8_t v = raster.values[i];
        mask[i] = (v != kNoData && !masked_classes.contains(v)) ? 1 : 0;
    }
    return mask;
}

LabelRaster upsample_nearest(const LabelRaster& raster, std::uint32_t factor) {
    if (factor == 0) throw DataError("upsample factor must be positive");
    check_shape(raster);
    LabelRaster out(raster.height * factor, raster.width * factor, raster.scheme);
    for (std::uint32_t i = 0; i < out.height; ++i) {
        for (std::uint32_t j = 0; j < out.width; ++j) {
            out.at(i, j) = raster.at(i / factor, j / factor);
        }
    }
    return out;
}

LabelRaster downsample_majority(const LabelRaster& raster, std::uint32_t factor) {
    if (factor == 0) throw DataError("downsample factor must be positive");
    if (raster.height % factor != 0 || raster.width % factor != 0) {
        throw DataError("downsample factor must divide the raster size");
    }
    check_shape(raster);
    LabelRaster out(raster.height / factor, raster.width / factor, raster.scheme);
    std::array<std::uint32_t, 256> votes{};
    for (std::uint32_t bi = 0; bi < out.height; ++bi) {
        for (std::uint32_t bj = 0; bj < out.width; ++bj) {
            votes.fill(0);
            for (std::uint32_t i = bi * factor; i < (bi + 1) * factor; ++i) {
                for (std::uint32_t j = bj * factor; j < (bj + 1) * factor; ++j) ++votes[raster.at(i, j)];
            }
            std::uint8_t best = kNoData;
            std::uint32_t best_votes = 0;
            for (std::size_t c = 1; c < votes.size(); ++c) {
                if (votes[c] > best_votes) {
                    best_votes = votes[c];
                    best = static_cast<std::uint8_t>(c);
                }
            }
            out.at(bi, bj) = best;
        }
    }
    return out;
}

} // namespace wlc::labels
