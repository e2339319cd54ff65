#include "wlc/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wlc/error.hpp"
#include "wlc/parallel.hpp"
#include "wlc/rng.hpp"

namespace wlc::shallow {
namespace {

// Training rows stored column-major with a global sorted order per feature,
// shared read-only by all tree builders.
struct TrainingSet {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<std::vector<float>> columns;
    std::vector<std::uint8_t> y; // 0-based class index
    std::vector<std::vector<std::uint32_t>> sorted; // per feature, row ids by value
};

TrainingSet make_training_set(std::span<const float> x, std::size_t dim, std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> mask) {
    TrainingSet ts;
    ts.dim = dim;
    const std::size_t rows = labels.size();
    std::vector<std::size_t> picked;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!mask[r]) continue;
        if (labels[r] == kNoData || labels[r] > kNumClasses) {
            throw DataError("rf_fit: masked-in row " + std::to_string(r) + " has invalid label " +
                            std::to_string(labels[r]));
        }
        picked.push_back(r);
    }
    if (picked.empty()) throw DataError("rf_fit: no valid training pixels");
    ts.n = picked.size();
    ts.columns.assign(dim, std::vector<float>(ts.n));
    ts.y.resize(ts.n);
    for (std::size_t i = 0; i < ts.n; ++i) {
        const std::size_t r = picked[i];
        for (std::size_t f = 0; f < dim; ++f) ts.columns[f][i] = x[r * dim + f];
        ts.y[i] = static_cast<std::uint8_t>(labels[r] - 1);
    }
    ts.sorted.resize(dim);
    for (std::size_t f = 0; f < dim; ++f) {
        auto& order = ts.sorted[f];
        order.resize(ts.n);
        std::iota(order.begin(), order.end(), 0u);
        const auto& col = ts.columns[f];
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
    return ts;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& ts, const ForestParams& params, std::uint64_t seed)
        : ts_(ts), params_(params), rng_(seed),
          mtry_(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ts.dim))))) {}

    DecisionTree build() {
        bootstrap();
        left_flag_.assign(slot_row_.size(), 0);
        scratch_.resize(slot_row_.size());
        grow(0, slot_row_.size(), 0);
        return std::move(tree_);
    }

private:
    void bootstrap() {
        const std::size_t n = ts_.n;
        std::vector<std::uint32_t> counts(n, 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[rng_.uniform_index(n)];
        std::vector<std::uint32_t> start(n, 0);
        slot_row_.clear();
        slot_row_.reserve(n);
        for (std::size_t r = 0; r < n; ++r) {
            start[r] = static_cast<std::uint32_t>(slot_row_.size());
            for (std::uint32_t c = 0; c < counts[r]; ++c) slot_row_.push_back(static_cast<std::uint32_t>(r));
        }
        order_.assign(ts_.dim, {});
        for (std::size_t f = 0; f < ts_.dim; ++f) {
            auto& ord = order_[f];
            ord.reserve(n);
            for (std::uint32_t r : ts_.sorted[f]) {
                for (std::uint32_t c = 0; c < counts[r]; ++c) ord.push_back(start[r] + c);
            }
        }
    }

    float value(std::size_t f, std::uint32_t slot) const { return ts_.columns[f][slot_row_[slot]]; }
    std::uint8_t label(std::uint32_t slot) const { return ts_.y[slot_row_[slot]]; }

    struct Split {
        bool found = false;
        std::size_t feature = 0;
        std::size_t left_size = 0;
        float threshold = 0.0f;
        double score = -1.0;
    };

    // Best Gini split of a sorted segment. score = sum_c nL_c^2 / nL + sum_c nR_c^2 / nR,
    // which is maximal where the weighted child impurity is minimal.
    void scan(std::size_t f, std::size_t b, std::size_t e, const std::array<std::uint64_t, kNumClasses>& total,
              Split& best) const {
        const auto& ord = order_[f];
        std::array<std::uint64_t, kNumClasses> left{};
        std::array<std::uint64_t, kNumClasses> right = total;
        std::uint64_t sq_left = 0, sq_right = 0;
        for (auto c : right) sq_right += c * c;
        const std::size_t n = e - b;
        for (std::size_t i = b; i + 1 < e; ++i) {
            const std::uint8_t c = label(ord[i]);
            sq_left += 2 * left[c] + 1;
            ++left[c];
            sq_right -= 2 * right[c] - 1;
            --right[c];
            const float v = value(f, ord[i]);
            const float next = value(f, ord[i + 1]);
            if (!(v < next)) continue;
            const std::size_t nl = i - b + 1;
            const double score = static_cast<double>(sq_left) / static_cast<double>(nl) +
                                 static_cast<double>(sq_right) / static_cast<double>(n - nl);
            if (score > best.score) {
                float thr = v + (next - v) * 0.5f;
                if (!(thr < next)) thr = v;
                best = Split{true, f, nl, thr, score};
            }
        }
    }

    std::int32_t grow(std::size_t b, std::size_t e, std::size_t depth) {
        const auto node_id = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        std::array<std::uint64_t, kNumClasses> total{};
        for (std::size_t i = b; i < e; ++i) ++total[label(order_[0][i])];
        const std::size_t n = e - b;
        const bool pure = std::count_if(total.begin(), total.end(), [](auto c) { return c > 0; }) <= 1;

        Split best;
        if (!pure && depth < params_.max_depth && n >= params_.min_samples_split) {
            std::vector<std::size_t> features(ts_.dim);
            std::iota(features.begin(), features.end(), 0u);
            for (std::size_t i = features.size(); i > 1; --i) {
                std::swap(features[i - 1], features[rng_.uniform_index(i)]);
            }
            std::size_t tried = 0;
            for (std::size_t f : features) {
                if (tried == mtry_) break;
                const auto& ord = order_[f];
                if (!(value(f, ord[b]) < value(f, ord[e - 1]))) continue; // constant here
                ++tried;
                scan(f, b, e, total, best);
            }
        }

        if (!best.found) {
            tree_.nodes[node_id].leaf = static_cast<std::int32_t>(tree_.leaf_count());
            for (auto c : total) tree_.leaf_probs.push_back(static_cast<float>(static_cast<double>(c) / n));
            return node_id;
        }

        const std::size_t mid = b + best.left_size;
        for (std::size_t i = b; i < e; ++i) left_flag_[order_[best.feature][i]] = i < mid ? 1 : 0;
        for (auto& ord : order_) {
            // stable partition through the scratch buffer keeps every segment sorted
            std::size_t l = b, r = 0;
            for (std::size_t i = b; i < e; ++i) {
                if (left_flag_[ord[i]]) ord[l++] = ord[i];
                else scratch_[r++] = ord[i];
            }
            std::copy_n(scratch_.begin(), r, ord.begin() + static_cast<std::ptrdiff_t>(l));
        }

        tree_.nodes[node_id].feature = static_cast<std::int32_t>(best.feature);
        tree_.nodes[node_id].threshold = best.threshold;
        const std::int32_t left = grow(b, mid, depth + 1);
        const std::int32_t right = grow(mid, e, depth + 1);
        tree_.nodes[node_id].left = left;
        tree_.nodes[node_id].right = right;
        return node_id;
    }

    const TrainingSet& ts_;
    const ForestParams& params_;
    Rng rng_;
    std::size_t mtry_;
    std::vector<std::uint32_t> slot_row_;
    std::vector<std::vector<std::uint32_t>> order_;
    std::vector<std::uint8_t> left_flag_;
    std::vector<std::uint32_t> scratch_;
    DecisionTree tree_;
};

} // namespace

std::span<const float> DecisionTree::predict_proba(std::span<const float> x) const {
    std::size_t node = 0;
    while (nodes[node].feature >= 0) {
        const auto& nd = nodes[node];
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
    }
    return leaf(static_cast<std::size_t>(nodes[node].leaf));
}

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t deepest = 0;
    // preorder: parents precede children
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (nodes[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

ForestModel rf_fit(std::span<const float> x, std::size_t dim, std::span<const std::uint8_t> labels,
                   std::span<const std::uint8_t> mask, const ForestParams& params) {
    if (dim == 0 || x.size() != labels.size() * dim || mask.size() != labels.size()) {
        throw DataError("rf_fit: features, labels and mask differ in length");
    }
    if (params.n_trees == 0) throw DataError("rf_fit: n_trees must be at least 1");
    const TrainingSet ts = make_training_set(x, dim, labels, mask);

    ForestModel model;
    model.dim = dim;
    model.params = params;
    model.trees.resize(params.n_trees);
    parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
        TreeBuilder builder(ts, params, derive_seed(params.seed, t));
        model.trees[t] = builder.build();
    });
    return model;
}

ForestModel rf_fit(const preprocess::FeatureMatrix& features, std::span<const std::uint8_t> labels,
                   std::span<const std::uint8_t> mask, const ForestParams& params) {
    if (labels.size() != features.rows() || mask.size() != features.rows()) {
        throw DataError("rf_fit: labels/mask length does not match the feature rows");
    }
    std::vector<std::uint8_t> use(mask.size());
    for (std::size_t r = 0; r < mask.size(); ++r) use[r] = (mask[r] && features.finite[r]) ? 1 : 0;
    return rf_fit(features.values, features.dim, labels, use, params);
}

std::array<double, kNumClasses> rf_predict_proba(const ForestModel& model, std::span<const float> x) {
    if (x.size() != model.dim) {
        throw DataError("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                        std::to_string(model.dim));
    }
    std::array<double, kNumClasses> sum{};
    for (const auto& tree : model.trees) {
        const auto p = tree.predict_proba(x);
        for (std::size_t c = 0; c < kNumClasses; ++c) sum[c] += p[c];
    }
    for (double& v : sum) v /= static_cast<double>(model.trees.size());
    return sum;
}

std::uint8_t rf_predict_one(const ForestModel& model, std::span<const float> x) {
    const auto p = rf_predict_proba(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
        if (p[c] > p[best]) best = c;
    }
    return static_cast<std::uint8_t>(best + 1);
}

std::vector<std::uint8_t> rf_predict(const ForestModel& model, const preprocess::FeatureMatrix& features,
                                     unsigned threads) {
    if (features.dim != model.dim) {
        throw DataError("feature dimension " + std::to_string(features.dim) + " does not match model dimension " +
                        std::to_string(model.dim));
    }
    const std::size_t n = features.rows();
    std::vector<std::uint8_t> out(n, kNoData);
    constexpr std::size_t kChunk = 4096;
    parallel_for((n + kChunk - 1) / kChunk, threads, [&](std::size_t chunk) {
        const std::size_t end = std::min(n, (chunk + 1) * kChunk);
        for (std::size_t r = chunk * kChunk; r < end; ++r) {
            if (features.finite[r]) out[r] = rf_predict_one(model, features.row(r));
        }
    });
    return out;
}

} // namespace wlc::shallow
