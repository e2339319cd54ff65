#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wlc/types.hpp"

namespace wlc::synth {

// Feature order of a class mean: the 10 surface S2 bands, then VV, VH, all
// in normalised [0, 1] units.
inline constexpr std::size_t kSynthDim = 12;

struct ClassSpectrum {
    std::uint8_t id = 0;
    std::array<double, kSynthDim> mean{};
};

// Toolkit conventions, not measured values: sigma, p_flip and p_sav only
// shape the synthetic noise regime.
struct SynthConfig {
    std::uint32_t size = 128;      // H = W
    std::uint64_t seed = 0;
    std::uint32_t n_scenes = 1;
    std::uint32_t n_sites = 4;     // Voronoi sites per scene
    std::vector<ClassSpectrum> classes;
    double sigma = 0.02;
    std::uint32_t block_factor = 16;
    double p_flip = 0.05;
    std::uint8_t trigger_a = kForest;
    std::uint8_t trigger_b = kGrassland;
    double p_sav = 0.5;
};

// Six separable classes (Forest, Shrubland, Grassland, Croplands, Urban,
// Water) with the default noise settings.
SynthConfig default_config();

// Throws DataError on any violated invariant.
void validate(const SynthConfig& config);

SynthConfig config_from_json(const std::string& text);
std::string config_to_json(const SynthConfig& config);

// Voronoi HR map, noisy class spectra stored in raw units, degraded LR
// labels. Fully determined by config.seed.
Patch generate_scene(const SynthConfig& config, std::string id = "scene");

// Scene i is generate_scene with seed scene_seed(config, i) and id
// scene_id(i) ("scene_00042").
std::vector<Patch> generate_scenes(const SynthConfig& config);
std::string scene_id(std::uint32_t index);
std::uint64_t scene_seed(const SynthConfig& config, std::uint32_t index);

// Block majority (lowest id on ties), then Savanna substitution with
// probability p_sav for blocks holding both trigger classes, then a uniform
// flip to another configured class with probability p_flip. The result is
// block constant on the HR grid.
LabelRaster degrade_labels(const LabelRaster& hr, const SynthConfig& config, std::uint64_t seed);
LabelRaster degrade_labels(const LabelRaster& hr, const SynthConfig& config);

} // namespace wlc::synth
