#include "wlc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "json.hpp"
#include "wlc/binary_io.hpp"
#include "wlc/error.hpp"
#include "wlc/labels.hpp"
#include "wlc/rng.hpp"

namespace wlc {

std::optional<std::size_t> BandStack::find(const std::string& name) const {
    auto it = std::find(band_names.begin(), band_names.end(), name);
    if (it == band_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - band_names.begin());
}

const std::vector<std::string>& s1_band_names() {
    static const std::vector<std::string> names{"VV", "VH"};
    return names;
}

const std::vector<std::string>& s2_all_band_names() {
    static const std::vector<std::string> names{"B1", "B2", "B3", "B4", "B5",  "B6", "B7",
                                                "B8", "B8A", "B9", "B10", "B11", "B12"};
    return names;
}

const std::vector<std::string>& s2_surface_band_names() {
    static const std::vector<std::string> names{"B2", "B3", "B4", "B5",  "B6",
                                                "B7", "B8", "B8A", "B11", "B12"};
    return names;
}

namespace dataset {
namespace {

void check_stack(const BandStack& stack, const Patch& patch, const char* what) {
    if (stack.height != patch.height() || stack.width != patch.width()) {
        throw DataError(std::string(what) + " stack size differs from the label raster");
    }
    if (stack.data.size() != stack.band_count() * stack.plane_size()) {
        throw DataError(std::string(what) + " sample count does not match bands x H x W");
    }
    for (std::size_t i = 0; i < stack.data.size(); ++i) {
        if (!std::isfinite(stack.data[i])) {
            throw DataError(std::string(what) + " holds a non-finite value in band '" +
                            stack.band_names[i / stack.plane_size()] + "'");
        }
    }
}

void check_labels(const LabelRaster& raster, const Patch& patch, const char* what) {
    if (raster.height != patch.height() || raster.width != patch.width() ||
        raster.values.size() != patch.pixel_count()) {
        throw DataError(std::string(what) + " raster size differs from the patch size");
    }
    const std::uint8_t max_id = max_class_id(raster.scheme);
    for (std::uint8_t v : raster.values) {
        if (v > max_id) throw DataError(std::string(what) + " holds illegal class id " + std::to_string(v));
    }
}

std::uint8_t scheme_byte(Scheme s) { return static_cast<std::uint8_t>(s); }

void read_planes(ByteReader& in, BandStack& stack, const char* field) {
    for (float& v : stack.data) {
        const std::size_t at = in.offset();
        v = in.f32(field);
        if (!std::isfinite(v)) throw FormatError(field, at, "non-finite band value");
    }
}

void read_labels(ByteReader& in, LabelRaster& raster, const char* field) {
    const std::size_t base = in.offset();
    auto raw = in.bytes(raster.values.size(), field);
    const std::uint8_t max_id = max_class_id(raster.scheme);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] > max_id) {
            throw FormatError(field, base + i, "illegal class id " + std::to_string(raw[i]));
        }
    }
    std::copy(raw.begin(), raw.end(), raster.values.begin());
}

} // namespace

void validate_patch(const Patch& patch) {
    if (patch.height() == 0 || patch.width() == 0) throw DataError("patch must be at least 1x1");
    check_labels(patch.lr_labels, patch, "lr_labels");
    if (patch.hr_labels) {
        if (patch.hr_labels->scheme != Scheme::Simplified10) {
            throw DataError("hr_labels must use the simplified scheme");
        }
        check_labels(*patch.hr_labels, patch, "hr_labels");
    }
    if (patch.s1) {
        if (patch.s1->band_names != s1_band_names()) throw DataError("s1 bands must be VV, VH");
        check_stack(*patch.s1, patch, "s1");
    }
    if (patch.s2.band_names != s2_all_band_names() && patch.s2.band_names != s2_surface_band_names()) {
        throw DataError("s2 bands must be the 13-band or the 10-band surface set");
    }
    check_stack(patch.s2, patch, "s2");
}

std::vector<std::uint8_t> encode_patch(const Patch& patch) {
    validate_patch(patch);
    ByteWriter out;
    out.tag(kPatchMagic);
    out.u16(kPatchVersion);
    out.u32(patch.height());
    out.u32(patch.width());
    out.u8(patch.s1 ? 1 : 0);
    out.u8(static_cast<std::uint8_t>(patch.s2.band_count()));
    out.u8(patch.hr_labels ? 1 : 0);
    out.u8(scheme_byte(patch.lr_labels.scheme));
    if (patch.s1) out.f32s(patch.s1->data);
    out.f32s(patch.s2.data);
    out.bytes(patch.lr_labels.values);
    if (patch.hr_labels) out.bytes(patch.hr_labels->values);
    return out.release();
}

Patch decode_patch(std::span<const std::uint8_t> bytes, std::string id) {
    ByteReader in(bytes);
    in.expect_tag(kPatchMagic, "magic");

    std::size_t at = in.offset();
    const std::uint16_t version = in.u16("version");
    if (version != kPatchVersion) throw FormatError("version", at, "unsupported version " + std::to_string(version));

    at = in.offset();
    const std::uint32_t height = in.u32("height");
    if (height == 0) throw FormatError("height", at, "height must be >= 1");
    at = in.offset();
    const std::uint32_t width = in.u32("width");
    if (width == 0) throw FormatError("width", at, "width must be >= 1");

    at = in.offset();
    const std::uint8_t s1_present = in.u8("s1_present");
    if (s1_present > 1) throw FormatError("s1_present", at, "flag must be 0 or 1");
    at = in.offset();
    const std::uint8_t s2_bands = in.u8("s2_band_count");
    if (s2_bands != 10 && s2_bands != 13) {
        throw FormatError("s2_band_count", at, "band count must be 10 or 13, got " + std::to_string(s2_bands));
    }
    at = in.offset();
    const std::uint8_t hr_present = in.u8("hr_present");
    if (hr_present > 1) throw FormatError("hr_present", at, "flag must be 0 or 1");
    at = in.offset();
    const std::uint8_t scheme = in.u8("scheme");
    if (scheme != 1 && scheme != 2) throw FormatError("scheme", at, "unknown scheme " + std::to_string(scheme));

    const std::uint64_t pixels = static_cast<std::uint64_t>(height) * width;
    const std::uint64_t planes = (s1_present ? 2u : 0u) + s2_bands;
    const std::uint64_t expected = planes * pixels * 4 + pixels * (hr_present ? 2u : 1u);
    if (expected > in.remaining()) {
        throw FormatError(in.remaining() < planes * pixels * 4 ? "bands" : "labels", bytes.size(),
                          "truncated file: payload needs " + std::to_string(expected) + " bytes, " +
                              std::to_string(in.remaining()) + " present");
    }

    Patch patch;
    patch.id = std::move(id);
    if (s1_present) {
        patch.s1.emplace(height, width, s1_band_names());
        read_planes(in, *patch.s1, "s1_bands");
    }
    patch.s2 = BandStack(height, width, s2_bands == 13 ? s2_all_band_names() : s2_surface_band_names());
    read_planes(in, patch.s2, "s2_bands");
    patch.lr_labels = LabelRaster(height, width, static_cast<Scheme>(scheme));
    read_labels(in, patch.lr_labels, "lr_labels");
    if (hr_present) {
        patch.hr_labels.emplace(height, width, Scheme::Simplified10);
        read_labels(in, *patch.hr_labels, "hr_labels");
    }
    in.expect_end("eof");
    return patch;
}

Patch read_patch(const std::filesystem::path& path) {
    return decode_patch(read_file(path), path.stem().string());
}

void write_patch(const Patch& patch, const std::filesystem::path& path) {
    const auto bytes = encode_patch(patch);
    write_file_atomic(path, bytes);
}

std::filesystem::path patch_path(const std::filesystem::path& data_dir, const std::string& id) {
    return data_dir / (id + kPatchExtension);
}

std::string to_string(SplitRole role) {
    switch (role) {
    case SplitRole::Train: return "train";
    case SplitRole::Holdout: return "holdout";
    case SplitRole::Validation: return "validation";
    case SplitRole::Test: return "test";
    }
    return "train";
}

SplitRole parse_role(const std::string& text) {
    if (text == "train") return SplitRole::Train;
    if (text == "holdout") return SplitRole::Holdout;
    if (text == "validation") return SplitRole::Validation;
    if (text == "test") return SplitRole::Test;
    throw DataError("unknown split role '" + text + "'");
}

SplitManifest parse_manifest(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("manifest", e.byte, "invalid JSON");
    }
    SplitManifest m;
    try {
        m.name = doc.at("name").get<std::string>();
        m.role = parse_role(doc.at("role").get<std::string>());
        m.patch_ids = doc.at("patch_ids").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("manifest: ") + e.what());
    }
    if (doc.contains("declared_size") && doc["declared_size"].get<std::size_t>() != m.patch_ids.size()) {
        throw DataError("manifest declared_size does not match the number of patch ids");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : m.patch_ids) {
        if (!seen.insert(id).second) throw DataError("duplicate patch id '" + id + "' in manifest");
    }
    return m;
}

std::string manifest_to_json(const SplitManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["name"] = manifest.name;
    doc["role"] = to_string(manifest.role);
    doc["declared_size"] = manifest.patch_ids.size();
    doc["patch_ids"] = manifest.patch_ids;
    return doc.dump(2) + "\n";
}

SplitManifest load_manifest(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse_manifest(std::string(bytes.begin(), bytes.end()));
}

void save_manifest(const SplitManifest& manifest, const std::filesystem::path& path) {
    write_file_atomic(path, manifest_to_json(manifest));
}

SplitManifest subsample_manifest(const SplitManifest& manifest, std::size_t n, std::uint64_t seed) {
    const std::size_t size = manifest.patch_ids.size();
    if (n > size) {
        throw DataError("cannot subsample " + std::to_string(n) + " of " + std::to_string(size) + " patches");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : manifest.patch_ids) {
        if (!seen.insert(id).second) throw DataError("duplicate patch id '" + id + "' in manifest");
    }
    // partial Fisher-Yates over indices
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.uniform_index(size - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());

    SplitManifest out;
    out.name = manifest.name;
    out.role = manifest.role;
    out.patch_ids.reserve(n);
    for (std::size_t i : idx) out.patch_ids.push_back(manifest.patch_ids[i]);
    return out;
}

std::vector<Patch> load_patches(const SplitManifest& manifest, const std::filesystem::path& data_dir) {
    std::vector<Patch> patches;
    patches.reserve(manifest.patch_ids.size());
    for (const auto& id : manifest.patch_ids) {
        try {
            patches.push_back(read_patch(patch_path(data_dir, id)));
        } catch (const FormatError& e) {
            throw FormatError(e.field(), e.offset(), "patch '" + id + "': " + e.what());
        }
    }
    return patches;
}

namespace {

const LabelRaster& pick(const Patch& p, Which which) {
    if (which == Which::LR) return p.lr_labels;
    if (!p.hr_labels) throw DataError("patch '" + p.id + "' has no high-resolution labels");
    return *p.hr_labels;
}

} // namespace

ClassHistogram class_histogram(std::span<const Patch> patches, Which which) {
    if (patches.empty()) throw DataError("class_histogram needs at least one patch");
    ClassHistogram h;
    for (const auto& p : patches) {
        const LabelRaster simplified = labels::as_simplified(pick(p, which));
        for (std::uint8_t v : simplified.values) {
            if (v != kNoData) ++h.counts[v - 1];
        }
    }
    for (auto c : h.counts) h.total += c;
    if (h.total > 0) {
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            h.fractions[c] = static_cast<double>(h.counts[c]) / static_cast<double>(h.total);
        }
    }
    return h;
}

ClassesPerPatch classes_per_patch(std::span<const Patch> patches, Which which) {
    if (patches.empty()) throw DataError("classes_per_patch needs at least one patch");
    ClassesPerPatch out;
    out.per_patch.reserve(patches.size());
    for (const auto& p : patches) {
        const LabelRaster simplified = labels::as_simplified(pick(p, which));
        std::array<bool, kNumClasses + 1> seen{};
        for (std::uint8_t v : simplified.values) seen[v] = true;
        std::uint32_t distinct = 0;
        for (std::size_t c = 1; c <= kNumClasses; ++c) distinct += seen[c] ? 1 : 0;
        out.per_patch.push_back(distinct);
        ++out.histogram[distinct];
    }
    return out;
}

} // namespace dataset
} // namespace wlc
