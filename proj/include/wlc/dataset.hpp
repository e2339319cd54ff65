#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wlc/types.hpp"

namespace wlc::dataset {

// Patch container layout (little-endian):
//   "WLCB" | u16 version | u32 H | u32 W | u8 s1_present | u8 s2_band_count
//   | u8 hr_present | u8 scheme | f32 planes (S1 then S2) | u8 lr labels
//   | u8 hr labels (if present)
// The scheme byte tags the LR raster; HR labels are always SIMPLIFIED10.
inline constexpr char kPatchMagic[] = "WLCB";
inline constexpr std::uint16_t kPatchVersion = 1;
inline constexpr std::size_t kPatchHeaderSize = 18;
inline constexpr const char* kPatchExtension = ".wlcb";

// Throws DataError describing the first violated invariant.
void validate_patch(const Patch& patch);

std::vector<std::uint8_t> encode_patch(const Patch& patch);

// `id` is not part of the container; callers pass it in (normally the file stem).
Patch decode_patch(std::span<const std::uint8_t> bytes, std::string id);

Patch read_patch(const std::filesystem::path& path);
void write_patch(const Patch& patch, const std::filesystem::path& path);

std::filesystem::path patch_path(const std::filesystem::path& data_dir, const std::string& id);

enum class SplitRole { Train, Holdout, Validation, Test };

std::string to_string(SplitRole role);
SplitRole parse_role(const std::string& text);

struct SplitManifest {
    std::string name;
    SplitRole role = SplitRole::Train;
    std::vector<std::string> patch_ids;

    std::size_t declared_size() const { return patch_ids.size(); }
    bool operator==(const SplitManifest&) const = default;
};

SplitManifest parse_manifest(const std::string& json_text);
std::string manifest_to_json(const SplitManifest& manifest);
SplitManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const SplitManifest& manifest, const std::filesystem::path& path);

// Uniform sample of n ids without replacement. Selected ids keep their
// manifest order, so n == size returns the manifest unchanged.
SplitManifest subsample_manifest(const SplitManifest& manifest, std::size_t n, std::uint64_t seed);

std::vector<Patch> load_patches(const SplitManifest& manifest, const std::filesystem::path& data_dir);

enum class Which { LR, HR };

struct ClassHistogram {
    std::array<std::uint64_t, kNumClasses> counts{};
    std::array<double, kNumClasses> fractions{};
    std::uint64_t total = 0;
};

// Per-class pixel counts over simplified classes (IGBP17 rasters are
// simplified first). No-data pixels are ignored.
ClassHistogram class_histogram(std::span<const Patch> patches, Which which);

struct ClassesPerPatch {
    std::vector<std::uint32_t> per_patch;           // distinct valid classes in each patch
    std::array<std::uint64_t, kNumClasses + 1> histogram{}; // index = number of classes
};

ClassesPerPatch classes_per_patch(std::span<const Patch> patches, Which which);

} // namespace wlc::dataset
