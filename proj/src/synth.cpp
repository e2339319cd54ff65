#include "wlc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "wlc/error.hpp"
#include "wlc/preprocess.hpp"
#include "wlc/rng.hpp"

namespace wlc::synth {
namespace {

enum Stream : std::uint64_t { kSites = 1, kNoise = 2, kDegrade = 3 };

} // namespace

SynthConfig default_config() {
    SynthConfig c;
    //                B2    B3    B4    B5    B6    B7    B8    B8A   B11   B12   VV    VH
    c.classes = {
        {kForest,    {0.03, 0.05, 0.03, 0.08, 0.20, 0.25, 0.28, 0.30, 0.15, 0.07, 0.60, 0.32}},
        {kShrubland, {0.06, 0.08, 0.09, 0.12, 0.18, 0.20, 0.22, 0.23, 0.25, 0.18, 0.48, 0.24}},
        {kGrassland, {0.05, 0.08, 0.06, 0.12, 0.25, 0.30, 0.34, 0.36, 0.22, 0.12, 0.42, 0.18}},
        {kCroplands, {0.07, 0.10, 0.10, 0.15, 0.22, 0.26, 0.30, 0.31, 0.28, 0.20, 0.54, 0.28}},
        {kUrban,     {0.12, 0.13, 0.14, 0.16, 0.18, 0.19, 0.20, 0.21, 0.24, 0.22, 0.80, 0.50}},
        {kWater,     {0.08, 0.06, 0.04, 0.03, 0.02, 0.02, 0.02, 0.02, 0.01, 0.01, 0.20, 0.04}},
    };
    return c;
}

void validate(const SynthConfig& c) {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw DataError(std::string("synth config: ") + name + " must lie in [0, 1]");
    };
    if (c.size == 0) throw DataError("synth config: size must be positive");
    if (c.block_factor == 0 || c.size % c.block_factor != 0) {
        throw DataError("synth config: block_factor must divide size");
    }
    if (c.n_sites == 0) throw DataError("synth config: n_sites must be positive");
    if (c.classes.empty()) throw DataError("synth config: at least one class is required");
    if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw DataError("synth config: sigma must be >= 0");
    prob(c.p_flip, "p_flip");
    prob(c.p_sav, "p_sav");
    ClassSet seen;
    for (const auto& cls : c.classes) {
        if (cls.id == kNoData || cls.id > kNumClasses) throw DataError("synth config: class id outside 1..10");
        if (seen.contains(cls.id)) throw DataError("synth config: duplicate class id " + std::to_string(cls.id));
        seen.insert(cls.id);
        for (double m : cls.mean) {
            if (!(m >= 0.0 && m <= 1.0)) throw DataError("synth config: class means must lie in [0, 1]");
        }
    }
    for (auto t : {c.trigger_a, c.trigger_b}) {
        if (t == kNoData || t > kNumClasses) throw DataError("synth config: trigger class outside 1..10");
    }
}

SynthConfig config_from_json(const std::string& text) {
    SynthConfig c = default_config();
    try {
        const auto doc = nlohmann::json::parse(text);
        c.size = doc.value("size", c.size);
        c.seed = doc.value("seed", c.seed);
        c.n_scenes = doc.value("n_scenes", c.n_scenes);
        c.n_sites = doc.value("n_sites", c.n_sites);
        c.sigma = doc.value("sigma", c.sigma);
        c.block_factor = doc.value("block_factor", c.block_factor);
        c.p_flip = doc.value("p_flip", c.p_flip);
        if (doc.contains("savanna")) {
            const auto& s = doc["savanna"];
            c.p_sav = s.value("p_sav", c.p_sav);
            if (s.contains("trigger")) {
                const auto t = s["trigger"].get<std::vector<int>>();
                if (t.size() != 2) throw DataError("synth config: savanna.trigger needs two class ids");
                c.trigger_a = static_cast<std::uint8_t>(t[0]);
                c.trigger_b = static_cast<std::uint8_t>(t[1]);
            }
        }
        if (doc.contains("classes")) {
            c.classes.clear();
            for (const auto& cls : doc["classes"]) {
                ClassSpectrum entry;
                entry.id = cls.at("id").get<std::uint8_t>();
                const auto mean = cls.at("mean").get<std::vector<double>>();
                if (mean.size() != kSynthDim) throw DataError("synth config: class mean needs 12 values");
                std::copy(mean.begin(), mean.end(), entry.mean.begin());
                c.classes.push_back(entry);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("synth config: ") + e.what());
    }
    validate(c);
    return c;
}

std::string config_to_json(const SynthConfig& c) {
    nlohmann::ordered_json doc;
    doc["size"] = c.size;
    doc["seed"] = c.seed;
    doc["n_scenes"] = c.n_scenes;
    doc["n_sites"] = c.n_sites;
    doc["sigma"] = c.sigma;
    doc["block_factor"] = c.block_factor;
    doc["p_flip"] = c.p_flip;
    doc["savanna"] = {{"trigger", {c.trigger_a, c.trigger_b}}, {"p_sav", c.p_sav}};
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& cls : c.classes) classes.push_back({{"id", cls.id}, {"mean", cls.mean}});
    doc["classes"] = classes;
    return doc.dump(2) + "\n";
}

LabelRaster degrade_labels(const LabelRaster& hr, const SynthConfig& config, std::uint64_t seed) {
    const std::uint32_t f = config.block_factor;
    if (f == 0 || hr.height % f != 0 || hr.width % f != 0) {
        throw DataError("degrade_labels: block_factor " + std::to_string(f) + " does not divide the raster size");
    }
    Rng rng(seed);
    LabelRaster lr(hr.height, hr.width, Scheme::Simplified10);
    std::array<std::uint32_t, kNumClasses + 1> votes{};
    std::vector<std::uint8_t> others;
    for (std::uint32_t bi = 0; bi < hr.height / f; ++bi) {
        for (std::uint32_t bj = 0; bj < hr.width / f; ++bj) {
            votes.fill(0);
            for (std::uint32_t i = bi * f; i < (bi + 1) * f; ++i)
                for (std::uint32_t j = bj * f; j < (bj + 1) * f; ++j) ++votes[hr.at(i, j)];

            std::uint8_t label = kNoData;
            for (std::size_t c = 1; c <= kNumClasses; ++c) {
                if (votes[c] > (label == kNoData ? 0u : votes[label])) label = static_cast<std::uint8_t>(c);
            }
            // one draw each per block keeps the stream aligned across configs
            const bool sav = rng.bernoulli(config.p_sav);
            const bool flip = rng.bernoulli(config.p_flip);
            const std::uint64_t pick = rng.next_u64();
            if (label != kNoData) {
                if (votes[config.trigger_a] > 0 && votes[config.trigger_b] > 0 && sav) label = kSavanna;
                if (flip) {
                    others.clear();
                    for (const auto& cls : config.classes) {
                        if (cls.id != label) others.push_back(cls.id);
                    }
                    if (!others.empty()) label = others[pick % others.size()];
                }
            }
            for (std::uint32_t i = bi * f; i < (bi + 1) * f; ++i)
                for (std::uint32_t j = bj * f; j < (bj + 1) * f; ++j) lr.at(i, j) = label;
        }
    }
    return lr;
}

LabelRaster degrade_labels(const LabelRaster& hr, const SynthConfig& config) {
    return degrade_labels(hr, config, derive_seed(config.seed, kDegrade));
}

Patch generate_scene(const SynthConfig& config, std::string id) {
    validate(config);
    const std::uint32_t n = config.size;

    Rng site_rng(derive_seed(config.seed, kSites));
    std::vector<double> sy(config.n_sites), sx(config.n_sites);
    std::vector<std::size_t> site_class(config.n_sites);
    for (std::uint32_t s = 0; s < config.n_sites; ++s) {
        sy[s] = site_rng.uniform01() * n;
        sx[s] = site_rng.uniform01() * n;
        site_class[s] = site_rng.uniform_index(config.classes.size());
    }

    Patch patch;
    patch.id = std::move(id);
    patch.hr_labels.emplace(n, n, Scheme::Simplified10);
    std::vector<std::size_t> pixel_class(static_cast<std::size_t>(n) * n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            const double y = i + 0.5, x = j + 0.5;
            std::size_t best = 0;
            double best_d = (sy[0] - y) * (sy[0] - y) + (sx[0] - x) * (sx[0] - x);
            for (std::uint32_t s = 1; s < config.n_sites; ++s) {
                const double d = (sy[s] - y) * (sy[s] - y) + (sx[s] - x) * (sx[s] - x);
                if (d < best_d) {
                    best_d = d;
                    best = s;
                }
            }
            const std::size_t p = static_cast<std::size_t>(i) * n + j;
            pixel_class[p] = site_class[best];
            patch.hr_labels->values[p] = config.classes[site_class[best]].id;
        }
    }

    patch.s2 = BandStack(n, n, s2_surface_band_names());
    patch.s1.emplace(n, n, s1_band_names());
    Rng noise(derive_seed(config.seed, kNoise));
    const std::size_t plane = static_cast<std::size_t>(n) * n;
    for (std::size_t p = 0; p < plane; ++p) {
        const auto& mean = config.classes[pixel_class[p]].mean;
        for (std::size_t f = 0; f < kSynthDim; ++f) {
            double v = mean[f];
            if (config.sigma > 0.0) v = std::clamp(v + config.sigma * noise.normal(), 0.0, 1.0);
            if (f < 10) {
                patch.s2.data[f * plane + p] = static_cast<float>(preprocess::denormalize_s2(v));
            } else {
                patch.s1->data[(f - 10) * plane + p] = static_cast<float>(preprocess::denormalize_s1(v));
            }
        }
    }
    patch.lr_labels = degrade_labels(*patch.hr_labels, config);
    return patch;
}

std::string scene_id(std::uint32_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%05u", index);
    return buf;
}

std::uint64_t scene_seed(const SynthConfig& config, std::uint32_t index) {
    return derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(index));
}

std::vector<Patch> generate_scenes(const SynthConfig& config) {
    std::vector<Patch> out;
    out.reserve(config.n_scenes);
    for (std::uint32_t i = 0; i < config.n_scenes; ++i) {
        SynthConfig scene = config;
        scene.seed = scene_seed(config, i);
        out.push_back(generate_scene(scene, scene_id(i)));
    }
    return out;
}

} // namespace wlc::synth
