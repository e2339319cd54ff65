#include "wlc/model_io.hpp"

#include "wlc/binary_io.hpp"
#include "wlc/error.hpp"

namespace wlc {
namespace {

void put_kmeans(ByteWriter& out, const shallow::KMeansModel& m) {
    out.u32(static_cast<std::uint32_t>(m.k));
    out.u32(static_cast<std::uint32_t>(m.dim));
    out.u32(static_cast<std::uint32_t>(m.params.n_init));
    out.u32(static_cast<std::uint32_t>(m.params.max_iter));
    out.u64(m.params.seed);
    out.f32(static_cast<float>(m.inertia));
    out.f32s(m.centroids);
    out.u8(m.cluster_to_class.empty() ? 0 : 1);
    out.bytes(m.cluster_to_class);
}

shallow::KMeansModel get_kmeans(ByteReader& in) {
    shallow::KMeansModel m;
    m.k = in.u32("k");
    m.dim = in.u32("dim");
    if (m.k == 0 || m.dim == 0) throw FormatError("k", in.offset(), "k and dim must be positive");
    m.params.k = m.k;
    m.params.n_init = in.u32("n_init");
    m.params.max_iter = in.u32("max_iter");
    m.params.seed = in.u64("seed");
    m.inertia = in.f32("inertia");
    if (in.remaining() < m.k * m.dim * 4) throw FormatError("centroids", in.offset(), "truncated centroids");
    m.centroids.resize(m.k * m.dim);
    for (auto& v : m.centroids) v = in.f32("centroids");
    const std::size_t at = in.offset();
    const std::uint8_t has_map = in.u8("has_map");
    if (has_map > 1) throw FormatError("has_map", at, "flag must be 0 or 1");
    if (has_map) {
        const auto map = in.bytes(m.k, "cluster_to_class");
        m.cluster_to_class.assign(map.begin(), map.end());
    }
    return m;
}

void put_forest(ByteWriter& out, const shallow::ForestModel& m) {
    out.u32(static_cast<std::uint32_t>(m.dim));
    out.u32(static_cast<std::uint32_t>(m.trees.size()));
    out.u32(static_cast<std::uint32_t>(m.params.max_depth));
    out.u32(static_cast<std::uint32_t>(m.params.min_samples_split));
    out.u64(m.params.seed);
    for (const auto& tree : m.trees) {
        out.u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& nd : tree.nodes) {
            out.u32(static_cast<std::uint32_t>(nd.feature));
            out.f32(nd.threshold);
            out.u32(static_cast<std::uint32_t>(nd.left));
            out.u32(static_cast<std::uint32_t>(nd.right));
            out.u32(static_cast<std::uint32_t>(nd.leaf));
        }
        out.u32(static_cast<std::uint32_t>(tree.leaf_count()));
        out.f32s(tree.leaf_probs);
    }
}

shallow::ForestModel get_forest(ByteReader& in) {
    shallow::ForestModel m;
    m.dim = in.u32("dim");
    m.params.n_trees = in.u32("n_trees");
    m.params.max_depth = in.u32("max_depth");
    m.params.min_samples_split = in.u32("min_samples_split");
    m.params.seed = in.u64("seed");
    if (m.dim == 0 || m.params.n_trees == 0) throw FormatError("dim", in.offset(), "dim and n_trees must be positive");
    m.trees.resize(m.params.n_trees);
    for (auto& tree : m.trees) {
        const std::size_t nodes_at = in.offset();
        const std::uint32_t n_nodes = in.u32("n_nodes");
        if (n_nodes == 0 || in.remaining() / 20 < n_nodes) throw FormatError("n_nodes", nodes_at, "bad node count");
        tree.nodes.resize(n_nodes);
        for (auto& nd : tree.nodes) {
            nd.feature = static_cast<std::int32_t>(in.u32("feature"));
            nd.threshold = in.f32("threshold");
            nd.left = static_cast<std::int32_t>(in.u32("left"));
            nd.right = static_cast<std::int32_t>(in.u32("right"));
            nd.leaf = static_cast<std::int32_t>(in.u32("leaf"));
        }
        const std::size_t leaves_at = in.offset();
        const std::uint32_t n_leaves = in.u32("n_leaves");
        if (in.remaining() / (4 * kNumClasses) < n_leaves) throw FormatError("n_leaves", leaves_at, "bad leaf count");
        tree.leaf_probs.resize(static_cast<std::size_t>(n_leaves) * kNumClasses);
        for (auto& v : tree.leaf_probs) v = in.f32("leaf_probs");
        // structural check so prediction cannot walk out of bounds
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& nd = tree.nodes[i];
            const bool ok = nd.feature < 0
                                ? (nd.leaf >= 0 && static_cast<std::uint32_t>(nd.leaf) < n_leaves)
                                : (static_cast<std::size_t>(nd.feature) < m.dim && nd.left > static_cast<std::int32_t>(i) &&
                                   nd.right > static_cast<std::int32_t>(i) && static_cast<std::uint32_t>(nd.left) < n_nodes &&
                                   static_cast<std::uint32_t>(nd.right) < n_nodes);
            if (!ok) throw FormatError("nodes", nodes_at, "inconsistent tree node " + std::to_string(i));
        }
    }
    return m;
}

void put_logreg(ByteWriter& out, const maskedlr::LogRegModel& m) {
    out.u32(static_cast<std::uint32_t>(m.classes));
    out.u32(static_cast<std::uint32_t>(m.dim));
    out.f32(static_cast<float>(m.config.learning_rate));
    out.u32(static_cast<std::uint32_t>(m.config.epochs));
    out.u32(static_cast<std::uint32_t>(m.config.batch_size));
    out.u64(m.config.seed);
    out.u32(static_cast<std::uint32_t>(m.selected_epoch));
    out.f32s(m.weights);
    out.f32s(m.bias);
}

maskedlr::LogRegModel get_logreg(ByteReader& in) {
    maskedlr::LogRegModel m;
    const std::size_t at = in.offset();
    m.classes = in.u32("classes");
    m.dim = in.u32("dim");
    if (m.classes != kNumClasses || m.dim == 0) throw FormatError("classes", at, "unexpected class count or dim");
    m.config.learning_rate = in.f32("learning_rate");
    m.config.epochs = in.u32("epochs");
    m.config.batch_size = in.u32("batch_size");
    m.config.seed = in.u64("seed");
    m.selected_epoch = in.u32("selected_epoch");
    if (in.remaining() < (m.classes * m.dim + m.classes) * 4) throw FormatError("weights", in.offset(), "truncated weights");
    m.weights.resize(m.classes * m.dim);
    for (auto& v : m.weights) v = in.f32("weights");
    m.bias.resize(m.classes);
    for (auto& v : m.bias) v = in.f32("bias");
    return m;
}

} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::KMeans: return "kmeans";
    case ModelKind::Forest: return "rf";
    case ModelKind::LogReg: return "logreg";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& text) {
    if (text == "kmeans") return ModelKind::KMeans;
    if (text == "rf") return ModelKind::Forest;
    if (text == "logreg") return ModelKind::LogReg;
    throw DataError("unknown model kind '" + text + "' (expected kmeans, rf or logreg)");
}

ModelKind ModelFile::kind() const { return static_cast<ModelKind>(model.index() + 1); }

std::size_t ModelFile::dim() const {
    return std::visit([](const auto& m) { return m.dim; }, model);
}

std::vector<std::uint8_t> encode_model(const ModelFile& file) {
    ByteWriter out;
    out.tag(kModelMagic);
    out.u16(kModelVersion);
    out.u8(static_cast<std::uint8_t>(file.kind()));
    out.u8(static_cast<std::uint8_t>(file.fusion));
    switch (file.kind()) {
    case ModelKind::KMeans: put_kmeans(out, std::get<shallow::KMeansModel>(file.model)); break;
    case ModelKind::Forest: put_forest(out, std::get<shallow::ForestModel>(file.model)); break;
    case ModelKind::LogReg: put_logreg(out, std::get<maskedlr::LogRegModel>(file.model)); break;
    }
    return out.release();
}

ModelFile decode_model(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    in.expect_tag(kModelMagic, "magic");
    std::size_t at = in.offset();
    const std::uint16_t version = in.u16("version");
    if (version != kModelVersion) throw FormatError("version", at, "unsupported version " + std::to_string(version));
    at = in.offset();
    const std::uint8_t kind = in.u8("kind");
    at = in.offset();
    const std::uint8_t fusion = in.u8("fusion");
    if (fusion != 1 && fusion != 2) throw FormatError("fusion", at, "unknown fusion mode " + std::to_string(fusion));

    ModelFile file;
    file.fusion = static_cast<preprocess::Fusion>(fusion);
    switch (kind) {
    case 1: file.model = get_kmeans(in); break;
    case 2: file.model = get_forest(in); break;
    case 3: file.model = get_logreg(in); break;
    default: throw FormatError("kind", at - 1, "unknown model kind " + std::to_string(kind));
    }
    in.expect_end("eof");
    if (file.dim() != preprocess::FusionConfig{file.fusion}.dim()) {
        throw FormatError("dim", 0, "model dimension does not match its fusion mode");
    }
    return file;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
    write_file_atomic(path, encode_model(file));
}

ModelFile load_model(const std::filesystem::path& path) { return decode_model(read_file(path)); }

} // namespace wlc
