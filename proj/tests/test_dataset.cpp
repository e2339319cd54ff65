#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "test_util.hpp"
#include "wlc/binary_io.hpp"
#include "wlc/dataset.hpp"
#include "wlc/error.hpp"
#include "wlc/labels.hpp"

using namespace wlc;
using namespace wlc::dataset;
using wlc::test::flat_patch;
using wlc::test::random_patch;
using wlc::test::scratch_dir;

TEST(PatchFormat, MinimalContainerDecodes) {
    Patch p = flat_patch(2, 2, kWater, false);
    const auto bytes = encode_patch(p);
    const Patch back = decode_patch(bytes, "tiny");
    EXPECT_EQ(back.id, "tiny");
    EXPECT_EQ(back.height(), 2u);
    EXPECT_EQ(back.width(), 2u);
    EXPECT_FALSE(back.s1.has_value());
    EXPECT_EQ(back.s2.band_count(), 10u);
    for (auto v : back.lr_labels.values) EXPECT_EQ(v, kWater);
}

TEST(PatchFormat, HeaderLayout) {
    Patch p = flat_patch(3, 5, kForest, true);
    p.hr_labels = LabelRaster(3, 5, Scheme::Simplified10, kUrban);
    const auto b = encode_patch(p);
    ASSERT_GE(b.size(), kPatchHeaderSize);
    EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "WLCB");
    EXPECT_EQ(b[4] | (b[5] << 8), 1);
    EXPECT_EQ(b[6], 3);
    EXPECT_EQ(b[10], 5);
    EXPECT_EQ(b[14], 1); // s1_present
    EXPECT_EQ(b[15], 10); // s2 bands
    EXPECT_EQ(b[16], 1); // hr_present
    EXPECT_EQ(b[17], 2); // scheme
}

TEST(PatchFormat, SizeArithmeticPerPlane) {
    // every 2x2 float plane costs 16 bytes after the header
    Patch p = flat_patch(2, 2, kWater, false);
    const std::size_t labels = 4;
    EXPECT_EQ(encode_patch(p).size(), kPatchHeaderSize + 10 * 16 + labels);
    p.s1 = BandStack(2, 2, s1_band_names());
    EXPECT_EQ(encode_patch(p).size(), kPatchHeaderSize + 12 * 16 + labels);
    p.hr_labels = LabelRaster(2, 2, Scheme::Simplified10, kWater);
    EXPECT_EQ(encode_patch(p).size(), kPatchHeaderSize + 12 * 16 + 2 * labels);
}

TEST(PatchFormat, NoHrMeansFlagZero) {
    const auto b = encode_patch(flat_patch(2, 2, kForest));
    EXPECT_EQ(b[16], 0);
}

TEST(PatchFormat, IllegalClassIdIsRejectedWithOffset) {
    auto b = encode_patch(flat_patch(2, 2, kWater, false));
    const std::size_t label_at = b.size() - 2;
    b[label_at] = 11;
    try {
        decode_patch(b, "x");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("illegal class id"), std::string::npos);
        EXPECT_EQ(e.offset(), label_at);
        EXPECT_EQ(e.field(), "lr_labels");
    }
}

TEST(PatchFormat, IgbpSchemeAcceptsSeventeen) {
    Patch p = flat_patch(1, 2, 0, false);
    p.lr_labels = wlc::test::raster(1, 2, {17, 8}, Scheme::Igbp17);
    const Patch back = decode_patch(encode_patch(p), "i");
    EXPECT_EQ(back.lr_labels.scheme, Scheme::Igbp17);
    EXPECT_EQ(back.lr_labels.values, (std::vector<std::uint8_t>{17, 8}));
}

TEST(PatchFormat, BadMagicAndTruncation) {
    auto b = encode_patch(flat_patch(2, 2, kWater, false));
    auto bad = b;
    bad[0] = 'X';
    EXPECT_THROW(decode_patch(bad, "x"), FormatError);
    for (std::size_t cut : {std::size_t{3}, std::size_t{10}, kPatchHeaderSize, b.size() - 1}) {
        std::vector<std::uint8_t> t(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
        EXPECT_THROW(decode_patch(t, "x"), FormatError) << "cut at " << cut;
    }
    auto extra = b;
    extra.push_back(0);
    EXPECT_THROW(decode_patch(extra, "x"), FormatError);
}

TEST(PatchFormat, BadHeaderFields) {
    const auto b = encode_patch(flat_patch(2, 2, kWater, false));
    auto v = b;
    v[4] = 2;
    EXPECT_THROW(decode_patch(v, "x"), FormatError);
    auto bands = b;
    bands[15] = 4;
    EXPECT_THROW(decode_patch(bands, "x"), FormatError);
    auto scheme = b;
    scheme[17] = 9;
    EXPECT_THROW(decode_patch(scheme, "x"), FormatError);
}

TEST(PatchFormat, NaNRejectedOnWriteAndRead) {
    Patch p = flat_patch(2, 2, kWater, false);
    p.s2.data[5] = std::numeric_limits<float>::quiet_NaN();
    const auto dir = scratch_dir("nan");
    EXPECT_THROW(write_patch(p, dir / "n.wlcb"), DataError);
    EXPECT_FALSE(std::filesystem::exists(dir / "n.wlcb"));

    p.s2.data[5] = 1.0f;
    auto b = encode_patch(p);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(b.data() + kPatchHeaderSize + 4 * 5, &nan, 4);
    EXPECT_THROW(decode_patch(b, "x"), FormatError);
}

TEST(PatchFormat, ValidateRejectsShapeMismatch) {
    Patch p = flat_patch(2, 2, kWater);
    p.hr_labels = LabelRaster(2, 3, Scheme::Simplified10, kWater);
    EXPECT_THROW(validate_patch(p), DataError);
    p.hr_labels.reset();
    p.s2.band_names.pop_back();
    EXPECT_THROW(validate_patch(p), DataError);
}

TEST(PatchFormat, RandomRoundTripIsByteIdentical) {
    Rng rng(11);
    const auto dir = scratch_dir("roundtrip");
    for (int i = 0; i < 200; ++i) {
        const Patch p = random_patch(rng);
        const auto path = dir / "r.wlcb";
        write_patch(p, path);
        const auto bytes = read_file(path);
        const Patch back = read_patch(path);
        EXPECT_EQ(back.id, "r");
        EXPECT_EQ(back.s2, p.s2);
        EXPECT_EQ(back.s1, p.s1);
        EXPECT_EQ(back.lr_labels, p.lr_labels);
        EXPECT_EQ(back.hr_labels, p.hr_labels);
        write_patch(back, dir / "r2.wlcb");
        EXPECT_EQ(read_file(dir / "r2.wlcb"), bytes);
    }
}

TEST(PatchFormat, WriteToMissingDirectoryFails) {
    EXPECT_THROW(write_patch(flat_patch(1, 1, 1), "/nonexistent_dir_wlc/x.wlcb"), IoError);
    EXPECT_THROW(read_patch("/nonexistent_dir_wlc/x.wlcb"), IoError);
}

TEST(ClassHistogram, SingleClassPatch) {
    const std::vector<Patch> ps{flat_patch(256, 256, kForest, false)};
    const auto h = class_histogram(ps, Which::LR);
    EXPECT_EQ(h.counts[0], 65536u);
    EXPECT_EQ(h.fractions[0], 1.0);
    EXPECT_EQ(h.total, 65536u);
}

TEST(ClassHistogram, TwoPatchesHalfAndHalf) {
    Patch a = flat_patch(2, 2, 0, false);
    a.lr_labels.values = {1, 1, 10, 10};
    const std::vector<Patch> ps{a, a};
    const auto h = class_histogram(ps, Which::LR);
    EXPECT_EQ(h.fractions[0], 0.5);
    EXPECT_EQ(h.fractions[9], 0.5);
}

TEST(ClassHistogram, MatchesIndependentTally) {
    Rng rng(5);
    std::vector<Patch> ps;
    for (int i = 0; i < 20; ++i) {
        Patch p = flat_patch(16, 12, 0, false);
        p.lr_labels = wlc::test::random_raster(rng, 16, 12, 10);
        ps.push_back(p);
    }
    std::array<std::uint64_t, 11> oracle{};
    for (const auto& p : ps)
        for (std::uint32_t r = 0; r < p.height(); ++r)
            for (std::uint32_t c = 0; c < p.width(); ++c) ++oracle[p.lr_labels.at(r, c)];
    const auto h = class_histogram(ps, Which::LR);
    double sum = 0;
    for (std::size_t k = 1; k <= 10; ++k) {
        EXPECT_EQ(h.counts[k - 1], oracle[k]);
        sum += h.fractions[k - 1];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ClassHistogram, IgbpIsSimplifiedAndHrNeedsPresence) {
    Patch p = flat_patch(1, 3, 0, false);
    p.lr_labels = wlc::test::raster(1, 3, {8, 14, 0}, Scheme::Igbp17);
    const std::vector<Patch> ps{p};
    const auto h = class_histogram(ps, Which::LR);
    EXPECT_EQ(h.counts[kSavanna - 1], 1u);
    EXPECT_EQ(h.counts[kCroplands - 1], 1u);
    EXPECT_EQ(h.total, 2u);
    EXPECT_THROW(class_histogram(ps, Which::HR), DataError);
    EXPECT_THROW(class_histogram(std::vector<Patch>{}, Which::LR), DataError);
}

TEST(ClassesPerPatch, Examples) {
    Patch uniform = flat_patch(4, 4, kUrban, false);
    Patch three = flat_patch(1, 4, 0, false);
    three.lr_labels.values = {1, 4, 6, 4};
    const std::vector<Patch> ps{uniform, three};
    const auto c = classes_per_patch(ps, Which::LR);
    EXPECT_EQ(c.per_patch, (std::vector<std::uint32_t>{1, 3}));
    EXPECT_EQ(c.histogram[1], 1u);
    EXPECT_EQ(c.histogram[3], 1u);
}

TEST(ClassesPerPatch, MatchesSetSizeOracle) {
    Rng rng(8);
    std::vector<Patch> ps;
    for (int i = 0; i < 100; ++i) {
        Patch p = flat_patch(6, 6, 0, false);
        const auto max_id = static_cast<std::uint8_t>(1 + rng.uniform_index(10));
        p.lr_labels = wlc::test::random_raster(rng, 6, 6, max_id);
        ps.push_back(p);
    }
    std::array<std::uint64_t, 11> oracle{};
    for (const auto& p : ps) {
        std::set<std::uint8_t> s;
        for (auto v : p.lr_labels.values)
            if (v) s.insert(v);
        ++oracle[s.size()];
    }
    EXPECT_EQ(classes_per_patch(ps, Which::LR).histogram, oracle);
}

namespace {
SplitManifest make_manifest(std::size_t n) {
    SplitManifest m;
    m.name = "m";
    m.role = SplitRole::Holdout;
    for (std::size_t i = 0; i < n; ++i) m.patch_ids.push_back("id" + std::to_string(i));
    return m;
}
} // namespace

TEST(Manifest, JsonRoundTrip) {
    const auto m = make_manifest(7);
    EXPECT_EQ(parse_manifest(manifest_to_json(m)), m);
    const auto dir = scratch_dir("manifest");
    save_manifest(m, dir / "m.json");
    EXPECT_EQ(load_manifest(dir / "m.json"), m);
}

TEST(Manifest, ParseErrors) {
    EXPECT_THROW(parse_manifest(R"({"name":"a","role":"train","patch_ids":["x","x"]})"), DataError);
    EXPECT_THROW(parse_manifest(R"({"name":"a","role":"bogus","patch_ids":[]})"), DataError);
    EXPECT_THROW(parse_manifest(R"({"name":"a","role":"test","patch_ids":["x"],"declared_size":2})"), DataError);
    EXPECT_THROW(parse_manifest("{not json"), FormatError);
    const auto m = parse_manifest(R"({"name":"v","role":"validation","patch_ids":["a","b"]})");
    EXPECT_EQ(m.role, SplitRole::Validation);
    EXPECT_EQ(m.declared_size(), 2u);
}

TEST(Subsample, FullSizeKeepsIdSet) {
    const auto m = make_manifest(10);
    const auto s = subsample_manifest(m, 10, 42);
    EXPECT_EQ(s.patch_ids, m.patch_ids);
    EXPECT_EQ(s.role, m.role);
}

TEST(Subsample, ZeroGivesEmpty) {
    const auto s = subsample_manifest(make_manifest(10), 0, 1);
    EXPECT_TRUE(s.patch_ids.empty());
    EXPECT_EQ(s.role, SplitRole::Holdout);
}

TEST(Subsample, ErrorsAndReproducibility) {
    const auto m = make_manifest(10);
    EXPECT_THROW(subsample_manifest(m, 11, 1), DataError);
    auto dup = m;
    dup.patch_ids.push_back("id0");
    EXPECT_THROW(subsample_manifest(dup, 2, 1), DataError);
    EXPECT_EQ(subsample_manifest(m, 4, 9), subsample_manifest(m, 4, 9));
    const auto s = subsample_manifest(m, 4, 9);
    EXPECT_EQ(std::set<std::string>(s.patch_ids.begin(), s.patch_ids.end()).size(), 4u);
}

TEST(Subsample, FiveChooseTwoIsUniform) {
    const auto m = make_manifest(5);
    const int trials = 10000;
    std::map<std::pair<std::string, std::string>, int> freq;
    for (int t = 0; t < trials; ++t) {
        const auto s = subsample_manifest(m, 2, static_cast<std::uint64_t>(t) * 7919 + 1);
        ASSERT_EQ(s.patch_ids.size(), 2u);
        auto a = s.patch_ids[0], b = s.patch_ids[1];
        if (b < a) std::swap(a, b);
        ++freq[{a, b}];
    }
    ASSERT_EQ(freq.size(), 10u);
    const double p = 0.1;
    const double mean = trials * p;
    const double sigma = std::sqrt(trials * p * (1 - p));
    for (const auto& [pair, n] : freq) EXPECT_LE(std::abs(n - mean), 3 * sigma) << pair.first << "," << pair.second;
}

TEST(LoadPatches, UsesFileStemAsId) {
    const auto dir = scratch_dir("load");
    Patch p = flat_patch(2, 2, kForest);
    p.id = "abc";
    write_patch(p, patch_path(dir, "abc"));
    SplitManifest m;
    m.patch_ids = {"abc"};
    const auto ps = load_patches(m, dir);
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_EQ(ps[0].id, "abc");
    m.patch_ids = {"missing"};
    EXPECT_THROW(load_patches(m, dir), IoError);
}
