#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "wlc/error.hpp"
#include "wlc/kmeans.hpp"
#include "wlc/rng.hpp"

using namespace wlc;
using namespace wlc::shallow;

namespace {

std::vector<float> random_points(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<float> p(n * dim);
    for (auto& v : p) v = static_cast<float>(rng.uniform01());
    return p;
}

double sse(const std::vector<float>& pts, std::size_t dim, const std::vector<int>& side) {
    double total = 0;
    for (int g = 0; g < 2; ++g) {
        std::vector<double> mean(dim, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < side.size(); ++i) {
            if (side[i] != g) continue;
            ++count;
            for (std::size_t j = 0; j < dim; ++j) mean[j] += pts[i * dim + j];
        }
        if (count == 0) continue;
        for (auto& m : mean) m /= static_cast<double>(count);
        for (std::size_t i = 0; i < side.size(); ++i) {
            if (side[i] != g) continue;
            for (std::size_t j = 0; j < dim; ++j) {
                const double d = pts[i * dim + j] - mean[j];
                total += d * d;
            }
        }
    }
    return total;
}

void expect_monotone(const KMeansModel& m) {
    ASSERT_FALSE(m.inertia_trace.empty());
    for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) EXPECT_LE(m.inertia_trace[i], m.inertia_trace[i - 1] + 1e-12);
    EXPECT_EQ(m.inertia, m.inertia_trace.back());
}

preprocess::FeatureMatrix as_matrix(const std::vector<float>& pts, std::size_t dim) {
    preprocess::FeatureMatrix fm;
    fm.dim = dim;
    fm.values = pts;
    fm.valid.assign(pts.size() / dim, 1);
    fm.finite.assign(pts.size() / dim, 1);
    return fm;
}

} // namespace

TEST(KMeans, KPointsKClusters) {
    const std::vector<float> pts{0, 0, 1, 0, 0, 1, 1, 1};
    KMeansParams p;
    p.k = 4;
    const auto m = kmeans_fit(pts, 2, p);
    EXPECT_EQ(m.inertia, 0.0);
    std::multiset<std::pair<float, float>> got, want;
    for (std::size_t c = 0; c < 4; ++c) got.insert({m.centroid(c)[0], m.centroid(c)[1]});
    for (std::size_t i = 0; i < 4; ++i) want.insert({pts[2 * i], pts[2 * i + 1]});
    EXPECT_EQ(got, want);
}

TEST(KMeans, SeparatedGroupsGiveGroupMeans) {
    Rng rng(6);
    const std::size_t dim = 12, per = 50;
    std::vector<float> pts;
    std::vector<double> mean_a(dim, 0.0), mean_b(dim, 0.0);
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t i = 0; i < per; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const float v = static_cast<float>((g == 0 ? 0.0 : 0.9) + 0.1 * rng.uniform01());
                pts.push_back(v);
                (g == 0 ? mean_a : mean_b)[j] += v / static_cast<double>(per);
            }
        }
    }
    KMeansParams p;
    p.k = 2;
    const auto m = kmeans_fit(pts, dim, p);
    expect_monotone(m);
    const std::size_t a = m.centroid(0)[0] < 0.5f ? 0 : 1;
    for (std::size_t j = 0; j < dim; ++j) {
        EXPECT_NEAR(m.centroid(a)[j], mean_a[j], 1e-6);
        EXPECT_NEAR(m.centroid(1 - a)[j], mean_b[j], 1e-6);
    }
}

TEST(KMeans, NeverBeatsExhaustivePartitionOptimum) {
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + rng.uniform_index(6), dim = 1 + rng.uniform_index(3);
        const auto pts = random_points(rng, n, dim);
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> side(n);
        for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            for (std::size_t i = 0; i < n; ++i) side[i] = (mask >> i) & 1u;
            best = std::min(best, sse(pts, dim, side));
        }
        KMeansParams p;
        p.k = 2;
        p.seed = static_cast<std::uint64_t>(trial);
        const auto m = kmeans_fit(pts, dim, p);
        expect_monotone(m);
        EXPECT_GE(m.inertia, best - 1e-9);
        // the reported inertia is the SSE of its own final partition
        std::vector<int> own(n);
        for (std::size_t i = 0; i < n; ++i)
            own[i] = static_cast<int>(nearest_centroid(m, std::span<const float>(pts).subspan(i * dim, dim)));
        EXPECT_NEAR(m.inertia, sse(pts, dim, own), 1e-5);
    }
}

TEST(KMeans, DeterministicAndThreadIndependent) {
    Rng rng(1);
    const auto pts = random_points(rng, 500, 5);
    KMeansParams p;
    p.k = 6;
    p.seed = 17;
    p.threads = 1;
    const auto a = kmeans_fit(pts, 5, p);
    p.threads = 4;
    const auto b = kmeans_fit(pts, 5, p);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.inertia_trace, b.inertia_trace);
    EXPECT_EQ(a.best_run, b.best_run);
    expect_monotone(a);
    p.seed = 18;
    const auto c = kmeans_fit(pts, 5, p);
    expect_monotone(c);
}

TEST(KMeans, DuplicatePointsAndEmptyClusters) {
    // many duplicates with few distinct values exercise the empty-cluster path
    std::vector<float> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(0.0f);
    for (int i = 0; i < 3; ++i) pts.push_back(1.0f);
    pts.push_back(0.5f);
    KMeansParams p;
    p.k = 3;
    for (std::uint64_t s = 0; s < 20; ++s) {
        p.seed = s;
        const auto m = kmeans_fit(pts, 1, p);
        expect_monotone(m);
        EXPECT_EQ(m.inertia, 0.0);
    }
    p.k = 4;
    EXPECT_THROW(kmeans_fit(pts, 1, p), DataError);
}

TEST(KMeans, FeatureMatrixUsesValidRows) {
    auto fm = as_matrix({0, 0, 1, 1, 5, 5}, 2);
    fm.valid[2] = 0;
    KMeansParams p;
    p.k = 2;
    const auto m = kmeans_fit(fm, p);
    EXPECT_EQ(m.inertia, 0.0);
    for (std::size_t c = 0; c < 2; ++c) EXPECT_LE(m.centroid(c)[0], 1.0f);
}

TEST(KMeans, NearestCentroidTieAndOracle) {
    KMeansModel m;
    m.k = 3;
    m.dim = 2;
    m.centroids = {0, 0, 2, 0, 0, 5};
    m.cluster_to_class = {kWater, kForest, kUrban};
    const std::vector<float> mid{1, 0};
    EXPECT_EQ(nearest_centroid(m, mid), 0u);
    EXPECT_EQ(nearest_centroid(m, std::vector<float>{2, 0}), 1u);
    EXPECT_THROW(nearest_centroid(m, std::vector<float>{1}), DataError);

    Rng rng(31);
    const auto pts = random_points(rng, 300, 2);
    auto fm = as_matrix(pts, 2);
    fm.finite[7] = 0;
    const auto pred = kmeans_predict(m, fm);
    for (std::size_t i = 0; i < 300; ++i) {
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t c = 0; c < 3; ++c) {
            const double dx = pts[2 * i] - m.centroids[2 * c], dy = pts[2 * i + 1] - m.centroids[2 * c + 1];
            if (dx * dx + dy * dy < bd) {
                bd = dx * dx + dy * dy;
                best = c;
            }
        }
        EXPECT_EQ(pred[i], i == 7 ? kNoData : m.cluster_to_class[best]);
    }
    m.cluster_to_class.clear();
    EXPECT_THROW(kmeans_predict(m, fm), DataError);
}

TEST(AlignClusters, BijectiveIdentity) {
    const std::vector<std::uint32_t> clusters{0, 1, 2, 0, 1, 2};
    const std::vector<std::uint8_t> ref{1, 2, 3, 1, 2, 3};
    const std::vector<std::uint8_t> mask(6, 1);
    const auto map = align_clusters(clusters, ref, mask, 3);
    EXPECT_EQ(map, (std::vector<std::uint8_t>{1, 2, 3}));
}

TEST(AlignClusters, MatchesPermutationBruteForce) {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 3;
        const std::uint8_t classes[3] = {2, 5, 9};
        std::vector<std::uint32_t> cl;
        std::vector<std::uint8_t> ref, mask;
        for (int i = 0; i < 200; ++i) {
            cl.push_back(static_cast<std::uint32_t>(rng.uniform_index(k)));
            ref.push_back(classes[rng.uniform_index(3)]);
            mask.push_back(rng.bernoulli(0.9));
        }
        auto agreement = [&](const std::vector<std::uint8_t>& map) {
            std::size_t a = 0;
            for (std::size_t i = 0; i < cl.size(); ++i) a += mask[i] && map[cl[i]] == ref[i];
            return a;
        };
        std::vector<std::uint8_t> perm{2, 5, 9};
        std::size_t best = 0;
        do best = std::max(best, agreement(perm));
        while (std::next_permutation(perm.begin(), perm.end()));
        const auto map = align_clusters(cl, ref, mask, k);
        EXPECT_EQ(agreement(map), best);
        EXPECT_EQ(std::set<std::uint8_t>(map.begin(), map.end()).size(), k);
    }
}

TEST(AlignClusters, EightByEightMatchesExhaustive) {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        // random 8x8 co-occurrence built from pixel counts on classes 1..8
        std::vector<std::uint32_t> cl;
        std::vector<std::uint8_t> ref;
        std::array<std::array<std::size_t, 8>, 8> counts{};
        for (int i = 0; i < 2000; ++i) {
            const auto c = static_cast<std::uint32_t>(rng.uniform_index(8));
            const auto r = static_cast<std::uint8_t>(1 + rng.uniform_index(8));
            cl.push_back(c);
            ref.push_back(r);
            ++counts[c][r - 1];
        }
        const std::vector<std::uint8_t> mask(cl.size(), 1);
        std::vector<std::size_t> perm(8);
        std::iota(perm.begin(), perm.end(), 0);
        std::size_t best = 0;
        do {
            std::size_t s = 0;
            for (std::size_t c = 0; c < 8; ++c) s += counts[c][perm[c]];
            best = std::max(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const auto map = align_clusters(cl, ref, mask, 8);
        std::size_t got = 0;
        for (std::size_t c = 0; c < 8; ++c) got += map[c] <= 8 ? counts[c][map[c] - 1] : 0;
        EXPECT_EQ(got, best);
        EXPECT_EQ(std::set<std::uint8_t>(map.begin(), map.end()).size(), 8u);
    }
}

TEST(AlignClusters, Errors) {
    const std::vector<std::uint32_t> cl{0, 1};
    const std::vector<std::uint8_t> ref{1, 2};
    EXPECT_THROW(align_clusters(cl, ref, std::vector<std::uint8_t>{0, 0}, 2), DataError);
    EXPECT_THROW(align_clusters(cl, ref, std::vector<std::uint8_t>{1, 1}, 11), DataError);
    EXPECT_THROW(align_clusters(cl, ref, std::vector<std::uint8_t>{1}, 2), DataError);
}

TEST(KMeans, CountClasses) {
    const std::vector<std::uint8_t> labels{1, 1, 4, 6, 0, 3};
    const std::vector<std::uint8_t> mask{1, 1, 1, 1, 1, 0};
    EXPECT_EQ(count_classes(labels, mask), 3u);
}
