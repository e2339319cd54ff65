#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wlc/forest.hpp"
#include "wlc/kmeans.hpp"
#include "wlc/maskedlr.hpp"
#include "wlc/preprocess.hpp"

namespace wlc {

// Model file: "WLCM" | u16 version | u8 kind | u8 fusion | kind payload.
// Integers little-endian, floats 32-bit.
inline constexpr char kModelMagic[] = "WLCM";
inline constexpr std::uint16_t kModelVersion = 1;

enum class ModelKind : std::uint8_t {
    KMeans = 1,
    Forest = 2,
    LogReg = 3,
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text); // kmeans | rf | logreg

struct ModelFile {
    preprocess::Fusion fusion = preprocess::Fusion::S1PlusS2;
    std::variant<shallow::KMeansModel, shallow::ForestModel, maskedlr::LogRegModel> model;

    ModelKind kind() const;
    std::size_t dim() const;
};

std::vector<std::uint8_t> encode_model(const ModelFile& file);
ModelFile decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

} // namespace wlc
