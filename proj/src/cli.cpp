#include "wlc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wlc/binary_io.hpp"
#include "wlc/dataset.hpp"
#include "wlc/error.hpp"
#include "wlc/labels.hpp"
#include "wlc/metrics.hpp"
#include "wlc/model_io.hpp"
#include "wlc/render.hpp"
#include "wlc/synth.hpp"

namespace wlc::cli {
namespace fs = std::filesystem;
namespace {

using dataset::Which;
using preprocess::FeatureMatrix;

constexpr std::size_t kDefaultSubsample = 2500;

Which parse_which(const std::string& s) {
    if (s == "lr") return Which::LR;
    if (s == "hr") return Which::HR;
    throw DataError("expected lr or hr, got '" + s + "'");
}

const LabelRaster& raster_of(const Patch& p, Which which) {
    if (which == Which::LR) return p.lr_labels;
    if (!p.hr_labels) throw DataError("patch '" + p.id + "' has no high-resolution labels");
    return *p.hr_labels;
}

ClassSet mask_policy(bool mask_savanna) { return mask_savanna ? savanna_only() : ClassSet{}; }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

void require_exists(const fs::path& path, const char* what) {
    if (!fs::exists(path)) throw IoError(std::string(what) + " '" + path.string() + "' does not exist");
}

// Features, simplified LR labels and the trainable mask of a patch set.
struct TrainingData {
    FeatureMatrix features;
    std::vector<std::uint8_t> labels;
    std::vector<std::uint8_t> mask;
};

TrainingData gather(std::span<const Patch> patches, preprocess::FusionConfig fusion, Which which,
                    const ClassSet& masked) {
    TrainingData td;
    td.features = preprocess::assemble_features(patches, fusion);
    for (const auto& p : patches) {
        const LabelRaster ref = labels::as_simplified(raster_of(p, which));
        const auto m = labels::trainable_mask(ref, masked);
        td.labels.insert(td.labels.end(), ref.values.begin(), ref.values.end());
        td.mask.insert(td.mask.end(), m.begin(), m.end());
    }
    for (std::size_t r = 0; r < td.mask.size(); ++r) td.mask[r] = td.mask[r] && td.features.finite[r];
    return td;
}

struct Common {
    std::string manifest;
    std::string data_dir;
    std::string out;
};

void add_io(CLI::App* cmd, Common& c, bool need_manifest = true) {
    auto* m = cmd->add_option("--manifest", c.manifest, "Split manifest (JSON)");
    auto* d = cmd->add_option("--data-dir", c.data_dir, "Directory holding <id>.wlcb containers");
    if (need_manifest) {
        m->required();
        d->required();
    }
    cmd->add_option("--out", c.out, "Output path")->required();
}

std::vector<Patch> load_set(const Common& c) {
    require_exists(c.manifest, "manifest");
    require_exists(c.data_dir, "data directory");
    return dataset::load_patches(dataset::load_manifest(c.manifest), c.data_dir);
}

// ---- synth -------------------------------------------------------------

struct SynthArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> block_factor;
    std::optional<std::uint32_t> scenes;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
    synth::SynthConfig cfg = synth::default_config();
    if (!a.config.empty()) {
        require_exists(a.config, "config");
        const auto bytes = read_file(a.config);
        cfg = synth::config_from_json(std::string(bytes.begin(), bytes.end()));
    }
    if (a.seed) cfg.seed = *a.seed;
    if (a.block_factor) cfg.block_factor = *a.block_factor;
    if (a.scenes) cfg.n_scenes = *a.scenes;
    synth::validate(cfg);

    ensure_dir(a.out);
    dataset::SplitManifest manifest;
    manifest.name = "synthetic";
    manifest.role = dataset::SplitRole::Test;
    for (std::uint32_t i = 0; i < cfg.n_scenes; ++i) {
        synth::SynthConfig scene = cfg;
        scene.seed = synth::scene_seed(cfg, i);
        const Patch p = synth::generate_scene(scene, synth::scene_id(i));
        dataset::write_patch(p, dataset::patch_path(a.out, p.id));
        manifest.patch_ids.push_back(p.id);
    }
    dataset::save_manifest(manifest, fs::path(a.out) / "manifest.json");
    write_text(fs::path(a.out) / "synth_config.json", synth::config_to_json(cfg));
    out << "wrote " << cfg.n_scenes << " scenes to " << a.out << "\n";
}

// ---- stats -------------------------------------------------------------

void cmd_stats(const Common& c, const std::string& which_text, std::ostream& out) {
    const Which which = parse_which(which_text);
    const auto patches = load_set(c);
    const auto hist = dataset::class_histogram(patches, which);
    const auto per = dataset::classes_per_patch(patches, which);
    ensure_dir(c.out);

    const auto& names = labels::scheme_map().class_names;
    std::ostringstream h;
    h << "class,name,pixels,fraction\n";
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", hist.fractions[k]);
        h << k + 1 << ',' << names[k] << ',' << hist.counts[k] << ',' << buf << '\n';
    }
    write_text(fs::path(c.out) / "class_histogram.csv", h.str());

    std::ostringstream p;
    p << "n_classes,patches\n";
    for (std::size_t k = 0; k < per.histogram.size(); ++k) p << k << ',' << per.histogram[k] << '\n';
    write_text(fs::path(c.out) / "classes_per_patch.csv", p.str());
    out << "pixels " << hist.total << " over " << patches.size() << " patches\n";
}

// ---- train -------------------------------------------------------------

struct TrainArgs {
    Common io;
    std::string model = "rf";
    std::string fusion = "s1s2";
    bool mask_savanna = true;
    std::size_t subsample = kDefaultSubsample;
    bool subsample_given = false;
    std::uint64_t seed = 0;
    std::optional<std::size_t> k;
    std::size_t n_init = 10;
    std::size_t max_iter = 300;
    std::size_t trees = 100;
    std::size_t depth = 10;
    std::size_t epochs = 50;
    double lr = 0.1;
    std::size_t batch = 4096;
    std::string holdout;
    std::string test;
    std::string select = "holdout";
    unsigned threads = 0;
};

fs::path curve_path(const fs::path& model_path) {
    fs::path p = model_path;
    p.replace_extension(".curve.csv");
    return p;
}

void cmd_train(const TrainArgs& a, std::ostream& out) {
    const auto kind = parse_model_kind(a.model);
    const preprocess::FusionConfig fusion{preprocess::parse_fusion(a.fusion)};
    const ClassSet masked = mask_policy(a.mask_savanna);

    require_exists(a.io.manifest, "manifest");
    require_exists(a.io.data_dir, "data directory");
    const auto full = dataset::load_manifest(a.io.manifest);
    const std::size_t n = a.subsample_given ? a.subsample : std::min(a.subsample, full.patch_ids.size());
    const auto manifest = dataset::subsample_manifest(full, n, a.seed);
    const auto patches = dataset::load_patches(manifest, a.io.data_dir);
    if (patches.empty()) throw DataError("training set is empty");
    const auto td = gather(patches, fusion, Which::LR, masked);

    ModelFile file;
    file.fusion = fusion.mode;
    std::ostringstream curve;

    switch (kind) {
    case ModelKind::KMeans: {
        shallow::KMeansParams p;
        p.k = a.k ? *a.k : shallow::count_classes(td.labels, td.mask);
        p.n_init = a.n_init;
        p.max_iter = a.max_iter;
        p.seed = a.seed;
        p.threads = a.threads;
        // cluster only pixels that take part in the alignment
        FeatureMatrix fit_rows = td.features;
        for (std::size_t r = 0; r < fit_rows.rows(); ++r) fit_rows.valid[r] = td.mask[r];
        auto model = shallow::kmeans_fit(fit_rows, p);
        const auto clusters = shallow::assign_clusters(model, td.features);
        model.cluster_to_class = shallow::align_clusters(clusters, td.labels, td.mask, model.k);
        curve << "iteration,inertia\n";
        for (std::size_t i = 0; i < model.inertia_trace.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", model.inertia_trace[i]);
            curve << i + 1 << ',' << buf << '\n';
        }
        out << "kmeans k=" << model.k << " inertia=" << model.inertia << "\n";
        file.model = std::move(model);
        break;
    }
    case ModelKind::Forest: {
        shallow::ForestParams p;
        p.n_trees = a.trees;
        p.max_depth = a.depth;
        p.seed = a.seed;
        p.threads = a.threads;
        auto model = shallow::rf_fit(td.features, td.labels, td.mask, p);
        curve << "tree,depth,nodes,leaves\n";
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            const auto& tree = model.trees[t];
            curve << t + 1 << ',' << tree.depth() << ',' << tree.nodes.size() << ',' << tree.leaf_count() << '\n';
        }
        out << "rf trees=" << model.trees.size() << "\n";
        file.model = std::move(model);
        break;
    }
    case ModelKind::LogReg: {
        maskedlr::LogRegConfig cfg;
        cfg.learning_rate = a.lr;
        cfg.epochs = a.epochs;
        cfg.batch_size = a.batch;
        cfg.seed = a.seed;

        std::optional<TrainingData> holdout_data, test_data;
        maskedlr::EvalSet holdout, test;
        if (!a.holdout.empty()) {
            require_exists(a.holdout, "holdout manifest");
            const auto ps = dataset::load_patches(dataset::load_manifest(a.holdout), a.io.data_dir);
            holdout_data = gather(ps, fusion, Which::LR, masked);
            holdout = {&holdout_data->features, holdout_data->labels, holdout_data->mask};
        }
        if (!a.test.empty()) {
            require_exists(a.test, "test manifest");
            const auto ps = dataset::load_patches(dataset::load_manifest(a.test), a.io.data_dir);
            test_data = gather(ps, fusion, Which::HR, masked);
            test = {&test_data->features, test_data->labels, test_data->mask};
        }
        const auto select = a.select == "test" ? maskedlr::Selection::Test : maskedlr::Selection::Holdout;
        if (a.select != "test" && a.select != "holdout") throw DataError("--select must be holdout or test");
        if (select == maskedlr::Selection::Test && !test_data) throw DataError("--select test needs --test");
        auto fit = maskedlr::logreg_fit(td.features, td.labels, td.mask, cfg, holdout_data ? &holdout : nullptr,
                                        test_data ? &test : nullptr, select);
        maskedlr::write_curve_csv(curve, fit.curve);
        out << "logreg selected epoch " << fit.model.selected_epoch << "\n";
        file.model = std::move(fit.model);
        break;
    }
    }

    const fs::path model_path = a.io.out;
    if (model_path.has_parent_path()) ensure_dir(model_path.parent_path());
    save_model(file, model_path);
    write_text(curve_path(model_path), curve.str());
}

// ---- predict -----------------------------------------------------------

void cmd_predict(const Common& c, const std::string& model_file, unsigned threads, std::ostream& out) {
    require_exists(model_file, "model file");
    const ModelFile file = load_model(model_file);
    const preprocess::FusionConfig fusion{file.fusion};
    require_exists(c.manifest, "manifest");
    require_exists(c.data_dir, "data directory");
    const auto manifest = dataset::load_manifest(c.manifest);
    ensure_dir(c.out);

    for (const auto& id : manifest.patch_ids) {
        Patch p = dataset::read_patch(dataset::patch_path(c.data_dir, id));
        const auto fm = preprocess::assemble_features(p, fusion);
        if (fm.dim != file.dim()) throw DataError("model/feature dimension mismatch");
        std::vector<std::uint8_t> pred;
        switch (file.kind()) {
        case ModelKind::KMeans: pred = shallow::kmeans_predict(std::get<shallow::KMeansModel>(file.model), fm); break;
        case ModelKind::Forest:
            pred = shallow::rf_predict(std::get<shallow::ForestModel>(file.model), fm, threads);
            break;
        case ModelKind::LogReg: pred = maskedlr::logreg_predict(std::get<maskedlr::LogRegModel>(file.model), fm); break;
        }
        p.lr_labels = LabelRaster(p.height(), p.width(), Scheme::Simplified10);
        p.lr_labels.values = std::move(pred);
        dataset::write_patch(p, dataset::patch_path(c.out, id));
    }
    dataset::save_manifest(manifest, fs::path(c.out) / "manifest.json");
    out << "predicted " << manifest.patch_ids.size() << " patches\n";
}

// ---- evaluate / transition / render ------------------------------------

void cmd_evaluate(const Common& c, const std::string& pred_text, const std::string& ref_text, bool mask_savanna,
                  std::ostream& out) {
    const Which pred = parse_which(pred_text);
    const Which ref = parse_which(ref_text);
    const auto patches = load_set(c);
    metrics::ConfusionMatrix cm;
    for (const auto& p : patches) cm += metrics::confusion(raster_of(p, ref), raster_of(p, pred), mask_policy(mask_savanna));
    const auto rep = metrics::report(cm);
    ensure_dir(c.out);
    std::ostringstream csv, matrix;
    metrics::write_report_csv(csv, rep);
    metrics::write_matrix_csv(matrix, cm);
    write_text(fs::path(c.out) / "report.csv", csv.str());
    write_text(fs::path(c.out) / "confusion.csv", matrix.str());
    write_text(fs::path(c.out) / "summary.json", metrics::summary_json(rep));
    out << "AA " << rep.aa << " OA " << rep.oa << " mIoU " << rep.miou << "\n";
}

void cmd_transition(const Common& c, std::ostream& out) {
    const auto patches = load_set(c);
    const auto tm = metrics::transition_matrix(patches);
    ensure_dir(c.out);
    std::ostringstream csv;
    metrics::write_matrix_csv(csv, tm);
    write_text(fs::path(c.out) / "transition.csv", csv.str());
    out << "transition matrix over " << patches.size() << " patches\n";
}

void cmd_render(const Common& c, const std::string& which_text, std::ostream& out) {
    const Which which = parse_which(which_text);
    const auto patches = load_set(c);
    ensure_dir(c.out);
    for (const auto& p : patches) {
        const auto img = render_labels(labels::as_simplified(raster_of(p, which)));
        write_file_atomic(fs::path(c.out) / (p.id + "_" + which_text + ".ppm"), img);
    }
    out << "rendered " << patches.size() << " images\n";
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weakly supervised land-cover mapping toolkit", "wlc"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate synthetic scenes with degraded labels");
    synth->add_option("--config", synth_args.config, "Generator config (JSON); defaults when omitted");
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--seed", synth_args.seed, "Override the config seed");
    synth->add_option("--block-factor", synth_args.block_factor, "Override the LR block factor");
    synth->add_option("--scenes", synth_args.scenes, "Override the number of scenes");

    Common stats_io;
    std::string stats_which = "lr";
    auto* stats = app.add_subcommand("stats", "Class distribution statistics");
    add_io(stats, stats_io);
    stats->add_option("--which", stats_which, "Label raster: lr or hr")->capture_default_str();

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Train a pixel-wise baseline on LR labels");
    add_io(train, ta.io);
    train->add_option("--model", ta.model, "kmeans | rf | logreg")->capture_default_str();
    train->add_option("--fusion", ta.fusion, "s2 | s1s2")->capture_default_str();
    train->add_flag("--mask-savanna", ta.mask_savanna, "Exclude Savanna pixels (use =false to keep)");
    auto* sub = train->add_option("--subsample", ta.subsample, "Patches sampled uniformly from the manifest");
    sub->capture_default_str();
    train->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
    train->add_option("--k", ta.k, "Clusters (default: distinct trainable classes)");
    train->add_option("--n-init", ta.n_init, "k-means++ restarts")->capture_default_str();
    train->add_option("--max-iter", ta.max_iter, "Lloyd iterations per restart")->capture_default_str();
    train->add_option("--trees", ta.trees, "Forest size")->capture_default_str();
    train->add_option("--depth", ta.depth, "Maximum tree depth")->capture_default_str();
    train->add_option("--epochs", ta.epochs, "Logistic regression epochs")->capture_default_str();
    train->add_option("--lr", ta.lr, "Learning rate")->capture_default_str();
    train->add_option("--batch", ta.batch, "Mini-batch size")->capture_default_str();
    train->add_option("--holdout", ta.holdout, "Hold-out manifest (LR labels) for checkpoint selection");
    train->add_option("--test", ta.test, "Test manifest (HR labels), reported per epoch");
    train->add_option("--select", ta.select, "Checkpoint selection: holdout | test")->capture_default_str();
    train->add_option("--threads", ta.threads, "Worker threads (0 = all cores)");

    Common pred_io;
    std::string model_file;
    unsigned pred_threads = 0;
    auto* predict = app.add_subcommand("predict", "Write predicted label rasters into containers");
    add_io(predict, pred_io);
    predict->add_option("--model-file", model_file, "Model file written by train")->required();
    predict->add_option("--threads", pred_threads, "Worker threads (0 = all cores)");

    Common eval_io;
    std::string eval_pred = "lr", eval_ref = "hr";
    bool eval_mask = true;
    auto* evaluate = app.add_subcommand("evaluate", "Score one label raster against another");
    add_io(evaluate, eval_io);
    evaluate->add_option("--pred", eval_pred, "Raster used as prediction: lr | hr")->capture_default_str();
    evaluate->add_option("--ref", eval_ref, "Raster used as reference: lr | hr")->capture_default_str();
    evaluate->add_flag("--mask-savanna", eval_mask, "Exclude reference Savanna pixels (use =false to keep)");

    Common trans_io;
    auto* transition = app.add_subcommand("transition", "LR -> HR class transition matrix");
    add_io(transition, trans_io);

    Common render_io;
    std::string render_which = "lr";
    auto* render = app.add_subcommand("render", "Render label rasters as PPM images");
    add_io(render, render_io);
    render->add_option("--which", render_which, "Label raster: lr or hr")->capture_default_str();

    std::string scheme_out;
    auto* scheme = app.add_subcommand("scheme", "Write the simplified IGBP scheme as JSON");
    scheme->add_option("--out", scheme_out, "Output file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << "\n";
        return 2;
    }

    try {
        ta.subsample_given = sub->count() > 0;
        if (*synth) cmd_synth(synth_args, out);
        else if (*stats) cmd_stats(stats_io, stats_which, out);
        else if (*train) cmd_train(ta, out);
        else if (*predict) cmd_predict(pred_io, model_file, pred_threads, out);
        else if (*evaluate) cmd_evaluate(eval_io, eval_pred, eval_ref, eval_mask, out);
        else if (*transition) cmd_transition(trans_io, out);
        else if (*render) cmd_render(render_io, render_which, out);
        else if (*scheme) write_text(scheme_out, labels::scheme_map_json());
    } catch (const FormatError& e) {
        err << "error: format: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "error: io: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const TrainingError& e) {
        err << "error: training: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const DataError& e) {
        err << "error: data: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}

} // namespace wlc::cli
