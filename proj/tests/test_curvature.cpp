#include "doctest.h"
#include "oracles.hpp"

#include "ffm/curvature.hpp"
#include "ffm/errors.hpp"
#include "ffm/fermat.hpp"

#include <limits>
#include <random>

using namespace ffm;

namespace {

// N + 2 points of the N-dimensional model of curvature K.
EdgeTuple measured(std::mt19937_64& g, int N, double K, double R) {
    for (;;) {
        std::vector<Vec> pts;
        for (int i = 0; i < N + 2; ++i) pts.push_back(oracle::random_point(g, N, K, R));
        // keep every sub-simplex of N + 1 points non-degenerate
        bool fat = true;
        for (int skip = 0; skip < N + 2 && fat; ++skip) {
            std::vector<Vec> sub;
            for (int i = 0; i < N + 2; ++i)
                if (i != skip) sub.push_back(pts[i]);
            fat = oracle::chart_fatness(sub, K) > 0.02;
        }
        if (fat) return oracle::tuple_of(pts, K);
    }
}

CombinedTuple fermat_tuple(std::mt19937_64& g, int N, double K, double R) {
    Weights w;
    const auto pts = oracle::fermat_configuration(g, N, K, R, w);
    return CombinedTuple{oracle::tuple_of(pts, K), w};
}

// Independent signature test of the cos / cosh matrix at K.
bool realizable_at(const EdgeTuple& t, double K) {
    const int m = t.m();
    Mat c(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            c(i, j) = K > 0 ? std::cos(oracle::kap(K) * t(i, j)) : std::cosh(oracle::kap(K) * t(i, j));
    const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(c).eigenvalues();
    const double tol = 1e-9 * ev.cwiseAbs().maxCoeff();
    return K > 0 ? ev.minCoeff() >= -tol : (ev[m - 1] > tol && ev[m - 2] <= tol);
}

CurvatureSign sign_of(double K) { return K > 0 ? CurvatureSign::positive : CurvatureSign::negative; }

} // namespace

TEST_CASE("normalized determinant") {
    const EdgeTuple t = EdgeTuple::from_upper({0.7}, 2);
    CHECK(normalized_curved_det(t, 1.0) == doctest::Approx(1 - std::pow(std::cos(0.7), 2)));
    // 2 points: det = sin^2(kappa a) / K -> a^2
    CHECK(normalized_curved_det(t, 1e-6) == doctest::Approx(0.49).epsilon(1e-6));
    CHECK(normalized_curved_det(t, -1e-6) == doctest::Approx(-0.49).epsilon(1e-6));
    CHECK_THROWS_AS(normalized_curved_det(t, 0.0), InvalidInput);
}

TEST_CASE("curvature recovered from Fermat tree data") {
    std::mt19937_64 g(91);
    for (double K : {0.5, -1.0, 2.0, -0.3}) {
        for (int N : {2, 3}) {
            double worst = 0.0;
            int ambiguous = 0;
            for (int i = 0; i < 50; ++i) {
                const CombinedTuple ct = fermat_tuple(g, N, K, K > 0 ? 0.5 : 0.6);
                const CurvatureEstimate e = estimate_curvature(ct, sign_of(K), 1e-3, 1e2);
                REQUIRE(e.K);
                worst = std::max(worst, std::abs(*e.K - K) / std::abs(K));
                CHECK_FALSE(e.flat_consistent);
                CHECK(e.radius() == doctest::Approx(1 / std::sqrt(std::abs(*e.K))));
                CHECK(tree_stationarity(ct, *e.K) <= 1e-7);
                if (e.admissible.size() > 1) ++ambiguous;
            }
            INFO("K = " << K << ", N = " << N);
            CHECK(worst <= 1e-6);
            MESSAGE("K = " << K << ", N = " << N << ": " << ambiguous << "/50 tuples realizable at several K");
        }
    }
}

TEST_CASE("edge data alone: admissible roots") {
    std::mt19937_64 g(95);
    for (double K : {0.5, -1.0}) {
        for (int N : {2, 3}) {
            double worst = 0.0;
            for (int i = 0; i < 50; ++i) {
                const EdgeTuple t = measured(g, N, K, K > 0 ? 0.5 : 0.6);
                const CurvatureEstimate e = estimate_curvature(t, sign_of(K), 1e-3, 1e2);
                REQUIRE(e.K);
                REQUIRE_FALSE(e.admissible.empty());
                CHECK(*e.K == e.admissible.front());
                CHECK(e.stationary.empty());
                double nearest = std::numeric_limits<double>::infinity();
                for (double r : e.admissible) {
                    nearest = std::min(nearest, std::abs(r - K) / std::abs(K));
                    CHECK(realizable_at(t, r));
                    const double nearby = std::max(std::abs(normalized_curved_det(t, 0.9 * r)),
                                                   std::abs(normalized_curved_det(t, 1.1 * r)));
                    CHECK(std::abs(normalized_curved_det(t, r)) <= 1e-4 * nearby);
                }
                worst = std::max(worst, nearest);
                for (std::size_t j = 1; j < e.admissible.size(); ++j)
                    CHECK(std::abs(e.admissible[j - 1]) <= std::abs(e.admissible[j]));
            }
            INFO("K = " << K << ", N = " << N);
            CHECK(worst <= 1e-6);
        }
    }
}

TEST_CASE("stationarity separates the true curvature") {
    std::mt19937_64 g(96);
    for (double K : {0.5, -1.0}) {
        const CombinedTuple ct = fermat_tuple(g, 3, K, 0.5);
        CHECK(tree_stationarity(ct, K) <= 1e-10);
        CHECK(tree_stationarity(ct, 1.5 * K) > 1e-4);
        CHECK(tree_stationarity(ct, 0.5 * K) > 1e-4);
    }
}

TEST_CASE("flat data") {
    std::mt19937_64 g(92);
    const EdgeTuple t = measured(g, 3, 0.0, 1.0);
    for (double s : {1.0, -1.0}) {
        const double d1 = std::abs(normalized_curved_det(t, s * 1e-2));
        const double d2 = std::abs(normalized_curved_det(t, s * 1e-4));
        CHECK(d2 < d1);
        CHECK(d2 < 1e-3 * d1 * 1e2 + 1e-12);
    }
    const CurvatureEstimate e = estimate_curvature(t, CurvatureSign::positive, 1e-3, 1e-1);
    CHECK(e.flat_consistent);
    CHECK_FALSE(e.K);
    CHECK(e.radius() == std::numeric_limits<double>::infinity());
}

TEST_CASE("missing roots and bad brackets") {
    std::mt19937_64 g(93);
    const EdgeTuple sph = measured(g, 2, 1.0, 0.5);
    CHECK_THROWS_AS(estimate_curvature(sph, CurvatureSign::negative, 1e-3, 1e2), NumericalFailure);
    const CombinedTuple tree = fermat_tuple(g, 2, 1.0, 0.5);
    CHECK_THROWS_AS(estimate_curvature(tree, CurvatureSign::negative, 1e-3, 1e2), NumericalFailure);
    CHECK_THROWS_AS(estimate_curvature(tree, CurvatureSign::positive, 5.0, 1e2), NumericalFailure);
    CHECK_THROWS_AS(estimate_curvature(sph, CurvatureSign::positive, 0.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(estimate_curvature(sph, CurvatureSign::positive, 2.0, 1.0), InvalidInput);
}

TEST_CASE("consensus over several tuples") {
    std::mt19937_64 g(94);
    std::vector<CombinedTuple> same, mixed;
    for (int i = 0; i < 5; ++i) same.push_back(fermat_tuple(g, 3, 0.25, 0.5));
    const CurvatureConsensus c = curvature_consensus(same, CurvatureSign::positive, 1e-3, 1e2);
    CHECK(c.estimates.size() == 5);
    CHECK(c.K == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(c.spread <= 1e-6 * 0.25);
    CHECK(c.same_sphere);

    mixed = same;
    mixed.push_back(fermat_tuple(g, 3, 0.4, 0.5));
    const CurvatureConsensus m = curvature_consensus(mixed, CurvatureSign::positive, 1e-3, 1e2);
    CHECK_FALSE(m.same_sphere);
    CHECK(m.spread == doctest::Approx(0.15).epsilon(1e-5));

    const CurvatureConsensus one = curvature_consensus({same[0]}, CurvatureSign::positive, 1e-3, 1e2);
    CHECK(one.K == doctest::Approx(c.estimates[0]).epsilon(1e-15));
    CHECK(one.spread == 0.0);
    CHECK_THROWS_AS(curvature_consensus(std::vector<CombinedTuple>{}, CurvatureSign::positive, 1e-3, 1e2),
                    InvalidInput);
    CHECK_THROWS_AS(curvature_consensus(std::vector<EdgeTuple>{}, CurvatureSign::positive, 1e-3, 1e2), InvalidInput);
}

TEST_CASE("multitree consensus") {
    const std::vector<double> lengths{1.0, 0.93, 0.88, 0.97, 0.91, 0.85};
    for (double K : {0.25, -1.0}) {
        const MultitreeSolution ms = multitree_solve(lengths, Weights{1.0, 1.2, 0.9, 1.1}, CurvedSpace(K, 3));
        REQUIRE(ms.entries.size() >= 2);
        const CurvatureConsensus c = multitree_curvature_consensus(ms, sign_of(K), 1e-3, 1e2);
        CHECK(c.estimates.size() >= 2);
        CHECK(c.K == doctest::Approx(K).epsilon(1e-6));
        CHECK(c.spread <= 1e-6 * std::abs(K));
        CHECK(c.same_sphere);
    }
}
