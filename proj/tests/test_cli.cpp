#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "test_util.hpp"
#include "wlc/binary_io.hpp"
#include "wlc/cli.hpp"
#include "wlc/dataset.hpp"
#include "wlc/model_io.hpp"

using namespace wlc;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    const auto b = read_file(p);
    return std::string(b.begin(), b.end());
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = wlc::test::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
        data = (dir / "data").string();
        const auto r = run({"synth", "--out", data, "--seed", "3", "--scenes", "3"});
        ASSERT_EQ(r.code, 0) << r.err;
        manifest = (dir / "data" / "manifest.json").string();
    }
    fs::path dir;
    std::string data;
    std::string manifest;
};

} // namespace

TEST_F(CliTest, SynthWritesScenesManifestAndConfig) {
    const auto m = dataset::load_manifest(manifest);
    EXPECT_EQ(m.patch_ids, (std::vector<std::string>{"scene_00000", "scene_00001", "scene_00002"}));
    EXPECT_EQ(m.role, dataset::SplitRole::Test);
    const auto cfg = nlohmann::json::parse(slurp(dir / "data" / "synth_config.json"));
    EXPECT_EQ(cfg["seed"], 3);
    EXPECT_EQ(cfg["n_scenes"], 3);
    EXPECT_NO_THROW(dataset::read_patch(dataset::patch_path(data, "scene_00001")));
}

TEST_F(CliTest, StatsOutputs) {
    const auto out = (dir / "stats").string();
    const auto r = run({"stats", "--manifest", manifest, "--data-dir", data, "--which", "hr", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto hist = slurp(dir / "stats" / "class_histogram.csv");
    EXPECT_EQ(hist.substr(0, hist.find('\n')), "class,name,pixels,fraction");
    EXPECT_NE(slurp(dir / "stats" / "classes_per_patch.csv").find("n_classes,patches"), std::string::npos);
}

TEST_F(CliTest, EvaluateIdentityScoresOne) {
    const auto out = (dir / "eval").string();
    const auto r = run({"evaluate", "--manifest", manifest, "--data-dir", data, "--pred", "hr", "--ref", "hr",
                        "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "eval" / "summary.json"));
    EXPECT_EQ(j["aa"], 1.0);
    EXPECT_EQ(j["oa"], 1.0);
    EXPECT_TRUE(fs::exists(dir / "eval" / "report.csv"));
    EXPECT_TRUE(fs::exists(dir / "eval" / "confusion.csv"));
}

TEST_F(CliTest, TrainPredictEvaluateEachModel) {
    for (const std::string kind : {"kmeans", "rf", "logreg"}) {
        const auto model = (dir / (kind + ".wlcm")).string();
        std::vector<std::string> args{"train", "--manifest", manifest, "--data-dir", data, "--model", kind,
                                      "--seed", "7", "--out", model};
        if (kind == "rf") args.insert(args.end(), {"--trees", "5", "--depth", "6"});
        if (kind == "logreg") args.insert(args.end(), {"--epochs", "3", "--holdout", manifest});
        if (kind == "kmeans") args.insert(args.end(), {"--n-init", "2", "--max-iter", "50"});
        auto r = run(args);
        ASSERT_EQ(r.code, 0) << kind << ": " << r.err;
        EXPECT_EQ(load_model(model).kind(), parse_model_kind(kind));
        EXPECT_TRUE(fs::exists(dir / (kind + ".curve.csv")));

        const auto pred = (dir / ("pred_" + kind)).string();
        r = run({"predict", "--manifest", manifest, "--data-dir", data, "--model-file", model, "--out", pred});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto patches = dataset::load_patches(dataset::load_manifest(pred + "/manifest.json"), pred);
        ASSERT_EQ(patches.size(), 3u);
        for (const auto& p : patches) {
            EXPECT_TRUE(p.hr_labels.has_value());
            for (auto v : p.lr_labels.values) EXPECT_NE(v, kSavanna);
        }
        r = run({"evaluate", "--manifest", pred + "/manifest.json", "--data-dir", pred, "--out", pred + "/eval"});
        ASSERT_EQ(r.code, 0) << r.err;
    }
}

TEST_F(CliTest, KmeansDefaultsKToClassCount) {
    const auto model = (dir / "k.wlcm").string();
    const auto r = run({"train", "--manifest", manifest, "--data-dir", data, "--model", "kmeans", "--n-init", "1",
                        "--fusion", "s2", "--out", model});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto f = load_model(model);
    EXPECT_EQ(f.fusion, preprocess::Fusion::S2Only);
    const auto& m = std::get<shallow::KMeansModel>(f.model);
    EXPECT_EQ(m.dim, 10u);
    EXPECT_GE(m.k, 2u);
    EXPECT_LE(m.k, 6u);
}

TEST_F(CliTest, TransitionAndRender) {
    auto r = run({"transition", "--manifest", manifest, "--data-dir", data, "--out", (dir / "t").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "t" / "transition.csv").substr(0, 6), "lr\\hr,");
    r = run({"render", "--manifest", manifest, "--data-dir", data, "--which", "hr", "--out", (dir / "img").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto img = read_file(dir / "img" / "scene_00000_hr.ppm");
    EXPECT_EQ(std::string(img.begin(), img.begin() + 15), "P6\n128 128\n255\n");
    EXPECT_EQ(img.size(), 15u + 3u * 128u * 128u);
}

TEST_F(CliTest, SchemeJson) {
    const auto r = run({"scheme", "--out", (dir / "scheme.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "scheme.json"))["classes"].size(), 10u);
}

TEST_F(CliTest, MaskSavannaToggle) {
    auto r = run({"evaluate", "--manifest", manifest, "--data-dir", data, "--ref", "lr", "--pred", "hr",
                  "--out", (dir / "a").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"evaluate", "--manifest", manifest, "--data-dir", data, "--ref", "lr", "--pred", "hr",
             "--mask-savanna=false", "--out", (dir / "b").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto a = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    const auto b = nlohmann::json::parse(slurp(dir / "b" / "summary.json"));
    EXPECT_LE(a["pixels"].get<std::uint64_t>(), b["pixels"].get<std::uint64_t>());
    EXPECT_EQ(b["pixels"], 3 * 128 * 128);
}

TEST_F(CliTest, SeededCommandsAreReproducible) {
    const auto a = (dir / "a.wlcm").string(), b = (dir / "b.wlcm").string();
    for (const auto& out : {a, b}) {
        const auto r = run({"train", "--manifest", manifest, "--data-dir", data, "--model", "rf", "--trees", "4",
                            "--subsample", "2", "--seed", "11", "--out", out});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_EQ(read_file(dir / "a.curve.csv"), read_file(dir / "b.curve.csv"));
}

TEST_F(CliTest, ErrorsAreSingleLines) {
    auto r = run({"train", "--manifest", manifest, "--data-dir", data, "--subsample", "4", "--out",
                  (dir / "x.wlcm").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: data: ", 0), 0u) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

    r = run({"train", "--bogus-flag"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error: usage: ", 0), 0u);

    r = run({});
    EXPECT_EQ(r.code, 2);

    r = run({"stats", "--manifest", (dir / "missing.json").string(), "--data-dir", data, "--out", "x"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: io: ", 0), 0u);

    r = run({"train", "--manifest", manifest, "--data-dir", data, "--model", "svm", "--out", "x"});
    EXPECT_EQ(r.code, 1);

    // a model trained on s2 features cannot read its file as s1s2
    const auto model = (dir / "m.wlcm").string();
    ASSERT_EQ(run({"train", "--manifest", manifest, "--data-dir", data, "--model", "logreg", "--epochs", "1",
                   "--fusion", "s2", "--out", model})
                  .code,
              0);
    auto bytes = read_file(model);
    bytes[7] = 2;
    write_file_atomic(model, bytes);
    r = run({"predict", "--manifest", manifest, "--data-dir", data, "--model-file", model, "--out",
             (dir / "p").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: format: ", 0), 0u) << r.err;
}
