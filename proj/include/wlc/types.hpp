#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wlc {

// Class ids of the simplified IGBP scheme. 0 is reserved for no-data in
// every raster.
inline constexpr std::size_t kNumClasses = 10;
inline constexpr std::uint8_t kNoData = 0;
inline constexpr std::uint8_t kForest = 1;
inline constexpr std::uint8_t kShrubland = 2;
inline constexpr std::uint8_t kSavanna = 3;
inline constexpr std::uint8_t kGrassland = 4;
inline constexpr std::uint8_t kWetlands = 5;
inline constexpr std::uint8_t kCroplands = 6;
inline constexpr std::uint8_t kUrban = 7;
inline constexpr std::uint8_t kSnowIce = 8;
inline constexpr std::uint8_t kBarren = 9;
inline constexpr std::uint8_t kWater = 10;

inline constexpr std::uint8_t kNumIgbpClasses = 17;

enum class Scheme : std::uint8_t {
    Igbp17 = 1,
    Simplified10 = 2,
};

inline constexpr std::uint8_t max_class_id(Scheme s) {
    return s == Scheme::Igbp17 ? kNumIgbpClasses : static_cast<std::uint8_t>(kNumClasses);
}

// Set of simplified class ids, used for masking policies.
class ClassSet {
public:
    constexpr ClassSet() = default;
    constexpr ClassSet(std::initializer_list<std::uint8_t> ids) {
        for (auto id : ids) insert(id);
    }

    constexpr void insert(std::uint8_t id) { bits_ |= static_cast<std::uint32_t>(1u << id); }
    constexpr void erase(std::uint8_t id) { bits_ &= ~static_cast<std::uint32_t>(1u << id); }
    constexpr bool contains(std::uint8_t id) const { return id < 32 && ((bits_ >> id) & 1u) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const ClassSet&) const = default;

private:
    std::uint32_t bits_ = 0;
};

inline constexpr ClassSet savanna_only() { return ClassSet{kSavanna}; }

struct LabelRaster {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    Scheme scheme = Scheme::Simplified10;
    std::vector<std::uint8_t> values; // row-major

    LabelRaster() = default;
    LabelRaster(std::uint32_t h, std::uint32_t w, Scheme s, std::uint8_t fill = kNoData)
        : height(h), width(w), scheme(s), values(static_cast<std::size_t>(h) * w, fill) {}

    std::size_t size() const { return values.size(); }
    std::uint8_t at(std::uint32_t row, std::uint32_t col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    std::uint8_t& at(std::uint32_t row, std::uint32_t col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    bool operator==(const LabelRaster&) const = default;
};

// Planar C x H x W stack of 32-bit samples.
struct BandStack {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<std::string> band_names;
    std::vector<float> data;

    BandStack() = default;
    BandStack(std::uint32_t h, std::uint32_t w, std::vector<std::string> names, float fill = 0.0f)
        : height(h), width(w), band_names(std::move(names)),
          data(band_names.size() * static_cast<std::size_t>(h) * w, fill) {}

    std::size_t band_count() const { return band_names.size(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }

    std::span<const float> band(std::size_t b) const {
        return std::span<const float>(data).subspan(b * plane_size(), plane_size());
    }
    std::span<float> band(std::size_t b) {
        return std::span<float>(data).subspan(b * plane_size(), plane_size());
    }
    // Index of a band by name, or nullopt.
    std::optional<std::size_t> find(const std::string& name) const;

    bool operator==(const BandStack&) const = default;
};

// Band naming conventions of the container. Sentinel-2 stacks carry either
// all 13 bands or the 10 surface bands.
const std::vector<std::string>& s1_band_names();
const std::vector<std::string>& s2_all_band_names();
const std::vector<std::string>& s2_surface_band_names();

// One scene sample: S1/S2 imagery with low-resolution labels on the same
// pixel grid and optional high-resolution reference labels.
struct Patch {
    std::string id;
    std::optional<BandStack> s1;
    BandStack s2;
    LabelRaster lr_labels;
    std::optional<LabelRaster> hr_labels;

    std::uint32_t height() const { return lr_labels.height; }
    std::uint32_t width() const { return lr_labels.width; }
    std::size_t pixel_count() const { return lr_labels.size(); }
};

} // namespace wlc
