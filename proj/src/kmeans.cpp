#include "wlc/kmeans.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "wlc/error.hpp"
#include "wlc/hungarian.hpp"
#include "wlc/parallel.hpp"
#include "wlc/rng.hpp"

namespace wlc::shallow {
namespace {

template <typename A, typename B>
double sq_dist(std::span<A> a, std::span<B> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        s += d * d;
    }
    return s;
}

bool has_k_distinct(std::span<const float> points, std::size_t dim, std::size_t k) {
    std::unordered_set<std::string> seen;
    std::vector<float> key(dim);
    const std::size_t n = points.size() / dim;
    for (std::size_t i = 0; i < n && seen.size() < k; ++i) {
        for (std::size_t j = 0; j < dim; ++j) key[j] = points[i * dim + j] + 0.0f; // folds -0 into +0
        seen.emplace(reinterpret_cast<const char*>(key.data()), dim * sizeof(float));
    }
    return seen.size() >= k;
}

struct Run {
    std::vector<double> centroids;
    std::vector<double> trace;
    double inertia = std::numeric_limits<double>::infinity();
};

class Lloyd {
public:
    Lloyd(std::span<const float> points, std::size_t dim, std::size_t k)
        : points_(points), dim_(dim), k_(k), n_(points.size() / dim) {}

    Run run(std::uint64_t seed, std::size_t max_iter) const {
        Run r;
        r.centroids = seed_plus_plus(seed);
        std::vector<std::uint32_t> assign(n_, std::numeric_limits<std::uint32_t>::max());
        std::vector<double> dist(n_, 0.0);

        bool converged = false;
        for (std::size_t it = 0; it < max_iter; ++it) {
            const bool changed = assign_step(r.centroids, assign, dist);
            record(r, dist);
            if (it > 0 && !changed) {
                converged = true;
                break;
            }
            update_step(r.centroids, assign, dist);
        }
        if (!converged) {
            assign_step(r.centroids, assign, dist);
            record(r, dist);
        }
        r.inertia = r.trace.back();
        return r;
    }

private:
    std::span<const float> point(std::size_t i) const { return points_.subspan(i * dim_, dim_); }
    std::span<const double> centre(const std::vector<double>& c, std::size_t j) const {
        return std::span<const double>(c).subspan(j * dim_, dim_);
    }

    std::vector<double> seed_plus_plus(std::uint64_t seed) const {
        Rng rng(seed);
        std::vector<double> c(k_ * dim_);
        auto take = [&](std::size_t slot, std::size_t idx) {
            const auto p = point(idx);
            for (std::size_t j = 0; j < dim_; ++j) c[slot * dim_ + j] = p[j];
        };
        take(0, rng.uniform_index(n_));
        std::vector<double> d2(n_);
        for (std::size_t i = 0; i < n_; ++i) d2[i] = sq_dist(point(i), centre(c, 0));
        std::vector<double> cumulative(n_);
        for (std::size_t slot = 1; slot < k_; ++slot) {
            double total = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                total += d2[i];
                cumulative[i] = total;
            }
            if (!(total > 0.0)) throw DataError("k-means++ seeding ran out of distinct points");
            const double target = rng.uniform01() * total;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
            std::size_t idx = it == cumulative.end() ? n_ - 1 : static_cast<std::size_t>(it - cumulative.begin());
            while (d2[idx] == 0.0 && idx > 0) --idx; // never re-pick an existing centre
            take(slot, idx);
            for (std::size_t i = 0; i < n_; ++i) d2[i] = std::min(d2[i], sq_dist(point(i), centre(c, slot)));
        }
        return c;
    }

    bool assign_step(const std::vector<double>& c, std::vector<std::uint32_t>& assign,
                     std::vector<double>& dist) const {
        bool changed = false;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto p = point(i);
            std::uint32_t best = 0;
            double best_d = sq_dist(p, centre(c, 0));
            for (std::size_t j = 1; j < k_; ++j) {
                const double d = sq_dist(p, centre(c, j));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<std::uint32_t>(j);
                }
            }
            if (assign[i] != best) changed = true;
            assign[i] = best;
            dist[i] = best_d;
        }
        return changed;
    }

    void update_step(std::vector<double>& c, const std::vector<std::uint32_t>& assign,
                     const std::vector<double>& dist) const {
        std::vector<double> sums(k_ * dim_, 0.0);
        std::vector<std::size_t> counts(k_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto p = point(i);
            const std::size_t a = assign[i];
            ++counts[a];
            for (std::size_t j = 0; j < dim_; ++j) sums[a * dim_ + j] += p[j];
        }
        std::vector<char> taken(n_, 0);
        for (std::size_t a = 0; a < k_; ++a) {
            if (counts[a] > 0) {
                for (std::size_t j = 0; j < dim_; ++j) {
                    c[a * dim_ + j] = sums[a * dim_ + j] / static_cast<double>(counts[a]);
                }
                continue;
            }
            // empty cluster: move it onto the point farthest from its centroid
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!taken[i] && dist[i] > far_d) {
                    far_d = dist[i];
                    far = i;
                }
            }
            taken[far] = 1;
            const auto p = point(far);
            for (std::size_t j = 0; j < dim_; ++j) c[a * dim_ + j] = p[j];
        }
    }

    static void record(Run& r, const std::vector<double>& dist) {
        double inertia = 0.0;
        for (double d : dist) inertia += d;
        if (!r.trace.empty()) {
            const double prev = r.trace.back();
            if (inertia > prev + 1e-9 * std::max(1.0, prev)) {
                throw std::logic_error("k-means inertia increased between Lloyd iterations");
            }
        }
        r.trace.push_back(inertia);
    }

    std::span<const float> points_;
    std::size_t dim_;
    std::size_t k_;
    std::size_t n_;
};

} // namespace

KMeansModel kmeans_fit(std::span<const float> points, std::size_t dim, const KMeansParams& params) {
    if (dim == 0 || points.size() % dim != 0) throw DataError("kmeans_fit: point buffer is not n x dim");
    if (params.k == 0) throw DataError("kmeans_fit: k must be at least 1");
    if (params.n_init == 0) throw DataError("kmeans_fit: n_init must be at least 1");
    if (!has_k_distinct(points, dim, params.k)) {
        throw DataError("kmeans_fit: fewer than k=" + std::to_string(params.k) + " distinct points");
    }

    const Lloyd lloyd(points, dim, params.k);
    std::vector<Run> runs(params.n_init);
    parallel_for(params.n_init, params.threads,
                 [&](std::size_t r) { runs[r] = lloyd.run(derive_seed(params.seed, r), params.max_iter); });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].inertia < runs[best].inertia) best = r;
    }

    KMeansModel model;
    model.k = params.k;
    model.dim = dim;
    model.params = params;
    model.best_run = best;
    model.inertia = runs[best].inertia;
    model.inertia_trace = std::move(runs[best].trace);
    model.centroids.reserve(runs[best].centroids.size());
    for (double v : runs[best].centroids) model.centroids.push_back(static_cast<float>(v));
    return model;
}

KMeansModel kmeans_fit(const preprocess::FeatureMatrix& features, const KMeansParams& params) {
    std::vector<float> pts;
    pts.reserve(features.values.size());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        if (!features.valid[r]) continue;
        const auto row = features.row(r);
        pts.insert(pts.end(), row.begin(), row.end());
    }
    return kmeans_fit(pts, features.dim, params);
}

std::uint32_t nearest_centroid(const KMeansModel& model, std::span<const float> x) {
    if (x.size() != model.dim) {
        throw DataError("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                        std::to_string(model.dim));
    }
    std::uint32_t best = 0;
    double best_d = sq_dist(x, model.centroid(0));
    for (std::size_t j = 1; j < model.k; ++j) {
        const double d = sq_dist(x, model.centroid(j));
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::uint32_t>(j);
        }
    }
    return best;
}

std::vector<std::uint32_t> assign_clusters(const KMeansModel& model, const preprocess::FeatureMatrix& features) {
    if (features.dim != model.dim) {
        throw DataError("feature dimension " + std::to_string(features.dim) + " does not match model dimension " +
                        std::to_string(model.dim));
    }
    std::vector<std::uint32_t> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) out[r] = nearest_centroid(model, features.row(r));
    return out;
}

std::vector<std::uint8_t> align_clusters(std::span<const std::uint32_t> cluster_labels,
                                         std::span<const std::uint8_t> reference,
                                         std::span<const std::uint8_t> mask, std::size_t k) {
    if (cluster_labels.size() != reference.size() || reference.size() != mask.size()) {
        throw DataError("align_clusters: inputs differ in length");
    }
    if (k == 0 || k > kNumClasses) {
        throw DataError("align_clusters: k must be in 1.." + std::to_string(kNumClasses));
    }
    std::vector<double> cooc(k * kNumClasses, 0.0);
    std::size_t valid = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (!mask[i] || reference[i] == kNoData) continue;
        if (reference[i] > kNumClasses) throw DataError("align_clusters: illegal reference class id");
        if (cluster_labels[i] >= k) throw DataError("align_clusters: cluster id out of range");
        cooc[cluster_labels[i] * kNumClasses + (reference[i] - 1)] += 1.0;
        ++valid;
    }
    if (valid == 0) throw DataError("align_clusters: no valid pixels");
    // maximise agreement by minimising negated counts
    for (double& v : cooc) v = -v;
    const auto sol = hungarian(cooc, k, kNumClasses);
    std::vector<std::uint8_t> map(k);
    for (std::size_t c = 0; c < k; ++c) map[c] = static_cast<std::uint8_t>(sol.row_to_col[c] + 1);
    return map;
}

std::vector<std::uint8_t> kmeans_predict(const KMeansModel& model, const preprocess::FeatureMatrix& features) {
    if (model.cluster_to_class.size() != model.k) {
        throw DataError("kmeans_predict: model has no cluster-to-class map");
    }
    const auto clusters = assign_clusters(model, features);
    std::vector<std::uint8_t> out(clusters.size());
    for (std::size_t r = 0; r < clusters.size(); ++r) {
        out[r] = features.finite[r] ? model.cluster_to_class[clusters[r]] : kNoData;
    }
    return out;
}

std::size_t count_classes(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> mask) {
    std::array<bool, 256> seen{};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (mask[i] && labels[i] != kNoData) seen[labels[i]] = true;
    }
    return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

} // namespace wlc::shallow
