#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wlc/preprocess.hpp"

namespace wlc::shallow {

struct KMeansParams {
    std::size_t k = 8;
    std::size_t n_init = 10;
    std::size_t max_iter = 300;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency; results do not depend on it
};

struct KMeansModel {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<float> centroids; // k x dim
    double inertia = 0.0;
    // cluster id -> simplified class id; empty until align_clusters ran
    std::vector<std::uint8_t> cluster_to_class;
    KMeansParams params;
    // inertia after every assignment step of the winning run
    std::vector<double> inertia_trace;
    std::size_t best_run = 0;

    std::span<const float> centroid(std::size_t c) const {
        return std::span<const float>(centroids).subspan(c * dim, dim);
    }
};

// n_init k-means++ seedings, each refined by Lloyd iterations until the
// assignment is stable or max_iter is reached; the lowest-inertia run wins
// (earliest on ties). Empty clusters are moved onto the point farthest from
// its centroid. Throws DataError when fewer than k distinct points exist.
KMeansModel kmeans_fit(std::span<const float> points, std::size_t dim, const KMeansParams& params);

// Fits on the valid rows of a feature matrix.
KMeansModel kmeans_fit(const preprocess::FeatureMatrix& features, const KMeansParams& params);

// Nearest centroid by squared Euclidean distance, lowest id on ties.
std::uint32_t nearest_centroid(const KMeansModel& model, std::span<const float> x);
std::vector<std::uint32_t> assign_clusters(const KMeansModel& model, const preprocess::FeatureMatrix& features);

// Builds the cluster x class co-occurrence over masked-in pixels and solves
// the maximum-agreement assignment. Returns cluster -> class (injective).
std::vector<std::uint8_t> align_clusters(std::span<const std::uint32_t> cluster_labels,
                                         std::span<const std::uint8_t> reference,
                                         std::span<const std::uint8_t> mask, std::size_t k);

// Nearest centroid then cluster -> class lookup. Rows whose sources were
// non-finite are predicted as no-data.
std::vector<std::uint8_t> kmeans_predict(const KMeansModel& model, const preprocess::FeatureMatrix& features);

// Number of distinct classes among masked-in labels (the default k).
std::size_t count_classes(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> mask);

} // namespace wlc::shallow
