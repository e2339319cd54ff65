#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wlc/error.hpp"
#include "wlc/model_io.hpp"

using namespace wlc;

namespace {

shallow::KMeansModel kmeans_model(std::size_t dim) {
    Rng rng(1);
    std::vector<float> pts;
    for (std::size_t i = 0; i < 60 * dim; ++i) pts.push_back(static_cast<float>(rng.uniform01()));
    shallow::KMeansParams p;
    p.k = 3;
    p.n_init = 2;
    auto m = shallow::kmeans_fit(pts, dim, p);
    m.cluster_to_class = {kWater, kForest, kUrban};
    return m;
}

shallow::ForestModel forest_model(std::size_t dim) {
    Rng rng(2);
    std::vector<float> x;
    std::vector<std::uint8_t> y, mask;
    for (int i = 0; i < 200; ++i) {
        for (std::size_t f = 0; f < dim; ++f) x.push_back(static_cast<float>(rng.uniform01()));
        y.push_back(x[x.size() - dim] > 0.5f ? kWater : kShrubland);
        mask.push_back(1);
    }
    shallow::ForestParams p;
    p.n_trees = 3;
    p.max_depth = 4;
    return shallow::rf_fit(x, dim, y, mask, p);
}

maskedlr::LogRegModel logreg_model(std::size_t dim) {
    maskedlr::LogRegModel m;
    m.dim = dim;
    for (std::size_t i = 0; i < 10 * dim; ++i) m.weights.push_back(static_cast<float>(i) * 0.25f - 3.0f);
    for (std::size_t i = 0; i < 10; ++i) m.bias.push_back(static_cast<float>(i));
    m.config.epochs = 7;
    m.config.seed = 99;
    m.selected_epoch = 4;
    return m;
}

} // namespace

TEST(ModelFile, KMeansRoundTrip) {
    const ModelFile f{preprocess::Fusion::S1PlusS2, kmeans_model(12)};
    const auto bytes = encode_model(f);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "WLCM");
    EXPECT_EQ(bytes[6], 1);
    EXPECT_EQ(bytes[7], 2);
    const auto back = decode_model(bytes);
    EXPECT_EQ(back.kind(), ModelKind::KMeans);
    const auto& m = std::get<shallow::KMeansModel>(back.model);
    EXPECT_EQ(m.centroids, std::get<shallow::KMeansModel>(f.model).centroids);
    EXPECT_EQ(m.cluster_to_class, (std::vector<std::uint8_t>{kWater, kForest, kUrban}));
    EXPECT_EQ(encode_model(back), bytes);
}

TEST(ModelFile, ForestRoundTripPredictsIdentically) {
    const ModelFile f{preprocess::Fusion::S2Only, forest_model(10)};
    const auto bytes = encode_model(f);
    EXPECT_EQ(bytes[6], 2);
    const auto back = decode_model(bytes);
    EXPECT_EQ(encode_model(back), bytes);
    const auto& a = std::get<shallow::ForestModel>(f.model);
    const auto& b = std::get<shallow::ForestModel>(back.model);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        std::vector<float> x(10);
        for (auto& v : x) v = static_cast<float>(rng.uniform01());
        EXPECT_EQ(shallow::rf_predict_proba(a, x), shallow::rf_predict_proba(b, x));
    }
}

TEST(ModelFile, LogRegRoundTrip) {
    const ModelFile f{preprocess::Fusion::S1PlusS2, logreg_model(12)};
    const auto back = decode_model(encode_model(f));
    const auto& m = std::get<maskedlr::LogRegModel>(back.model);
    EXPECT_EQ(m.weights, std::get<maskedlr::LogRegModel>(f.model).weights);
    EXPECT_EQ(m.selected_epoch, 4u);
    EXPECT_EQ(m.config.seed, 99u);
}

TEST(ModelFile, FileRoundTrip) {
    const auto dir = wlc::test::scratch_dir("model");
    const ModelFile f{preprocess::Fusion::S1PlusS2, logreg_model(12)};
    save_model(f, dir / "m.wlcm");
    EXPECT_EQ(encode_model(load_model(dir / "m.wlcm")), encode_model(f));
}

TEST(ModelFile, RejectsMalformedInput) {
    const auto good = encode_model(ModelFile{preprocess::Fusion::S2Only, forest_model(10)});
    auto magic = good;
    magic[1] = 'X';
    EXPECT_THROW(decode_model(magic), FormatError);
    auto kind = good;
    kind[6] = 9;
    EXPECT_THROW(decode_model(kind), FormatError);
    auto fusion = good;
    fusion[7] = 2; // forest has 10 features, s1s2 needs 12
    EXPECT_THROW(decode_model(fusion), FormatError);
    for (std::size_t cut = 0; cut < good.size(); cut += 37) {
        std::vector<std::uint8_t> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
        EXPECT_THROW(decode_model(t), FormatError) << cut;
    }
    auto extra = good;
    extra.push_back(1);
    EXPECT_THROW(decode_model(extra), FormatError);
    // a child index pointing backwards would make prediction loop
    auto loop = good;
    const std::size_t first_node = 8 + 4 * 4 + 8 + 4;
    loop[first_node + 8] = 0;
    loop[first_node + 9] = 0;
    loop[first_node + 10] = 0;
    loop[first_node + 11] = 0;
    EXPECT_THROW(decode_model(loop), FormatError);
}

TEST(ModelFile, KindNames) {
    EXPECT_EQ(parse_model_kind("kmeans"), ModelKind::KMeans);
    EXPECT_EQ(to_string(parse_model_kind("rf")), "rf");
    EXPECT_EQ(parse_model_kind("logreg"), ModelKind::LogReg);
    EXPECT_THROW(parse_model_kind("svm"), DataError);
}
