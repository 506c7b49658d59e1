// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "oracles.hpp"

#include "ffm/curvature.hpp"
#include "ffm/dekster_wilker.hpp"
#include "ffm/enumeration.hpp"
#include "ffm/fermat.hpp"
#include "ffm/immersion.hpp"
#include "ffm/inverse_infinity.hpp"
#include "ffm/realizability.hpp"
#include "ffm/tetrahedron_3k.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace ffm;

namespace {

constexpr double kPi = std::numbers::pi;

// Collects failed conditions and a one-line summary of the measured values.
struct Verdict {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (failures.size() < 5) failures.push_back(what);
        }
    }
};

int run(int id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0) v.require(secs < budget_s, "runtime over " + std::to_string(budget_s) + " s");
    std::printf("%s  %2d  %-28s %6.2f s  %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.detail.str().c_str());
    for (const auto& f : v.failures) std::printf("          - %s\n", f.c_str());
    std::fflush(stdout);
    return v.pass ? 0 : 1;
}

double max_edge(double K) { return K > 0 ? kPi / (4 * std::sqrt(K)) : 100.0; }
double box(double K) { return K > 0 ? 0.25 : (K < 0 ? 0.5 : 1.0); }
double sum(const Weights& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

// ---- shared solver instances (criteria 2 and 3) ----

struct Instance {
    double K = 0.0;
    int N = 2;
    std::vector<Vec> pts;
    Weights w;
    SimplexRealization r;
    FermatTree tree;
};

const std::vector<Instance>& instances() {
    static const std::vector<Instance> all = [] {
        std::mt19937_64 g(2024);
        std::uniform_real_distribution<double> uw(0.5, 2.0);
        std::vector<Instance> out;
        const double Ks[] = {0.0, 1.0, -1.0};
        for (int i = 0; i < 200; ++i) {
            Instance in;
            in.K = Ks[i % 3];
            in.N = 2 + (i / 3) % 2;
            in.pts = oracle::random_simplex(g, in.N, in.K, box(in.K), max_edge(in.K));
            in.w.resize(in.N + 1);
            for (double& b : in.w) b = uw(g);
            in.r = SimplexRealization{CurvedSpace(in.K, in.N), in.pts};
            in.tree = solve_fermat(in.r, in.w);
            out.push_back(std::move(in));
        }
        return out;
    }();
    return all;
}

// ---- criteria ----

void enumeration_count(Verdict& v) {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double lam = lambda_euclidean(1.0, 3);
    std::vector<double> l(6);
    for (double& x : l) x = lam + (1 - lam) * u(g);
    l[0] = 1.0;
    v.require(in_dw(EdgeTuple::from_upper(l, 4), 3, 0.0), "sextuple outside the Euclidean domain");
    const auto ms = enumerate_incongruent(l, CurvedSpace(0.0, 3));
    const int brute = oracle::brute_force_tetra_count(l);
    const int got = static_cast<int>(ms.members.size());
    v.require(got == brute, "count " + std::to_string(got) + " vs brute force " + std::to_string(brute));
    v.require(got <= 30, "more than 30 incongruent tetrahedra");
    v.require(ms.exhaustive, "enumeration not exhaustive");
    v.detail << "count " << got << ", brute force " << brute;
}

void solver_correctness(Verdict& v) {
    int floating = 0, absorbed = 0;
    double worst_obj = 0.0, worst_res = 0.0;
    for (const Instance& in : instances()) {
        const auto gm = oracle::grid_refine(in.pts, in.w, in.K, in.N == 2 ? 40 : 16);
        const Classification c = classify(in.r, in.w);
        v.require(in.tree.floating == (gm.vertex < 0), "solver classification differs from the grid");
        v.require(c.floating == (gm.vertex < 0), "inequality classification differs from the grid");
        if (!in.tree.floating) {
            ++absorbed;
            v.require(in.tree.absorbed_at == gm.vertex, "absorbing vertex differs from the grid");
            continue;
        }
        ++floating;
        const Vec x = oracle::weiszfeld(in.pts, in.w, in.K);
        const double fo = oracle::objective(x, in.pts, in.w, in.K);
        worst_obj = std::max(worst_obj, std::abs(in.tree.objective - fo) / fo);
        worst_res = std::max(worst_res, in.tree.residual / sum(in.w));
    }
    v.require(worst_obj <= 1e-6, "objective vs Weiszfeld above 1e-6");
    v.require(worst_res <= 1e-8, "stationarity residual above 1e-8");
    v.detail << floating << " floating, " << absorbed << " absorbed; obj rel " << worst_obj << ", residual "
             << worst_res;
}

void first_order_identities(Verdict& v) {
    double eq_n = 0.0, eq_tetra = 0.0, eq_plane = 0.0, additivity = 0.0;
    int n = 0;
    for (const Instance& in : instances()) {
        if (!in.tree.floating) continue;
        ++n;
        eq_n = std::max(eq_n, first_order_residual(in.tree, in.r, in.w));
        const EdgeTuple e = EdgeTuple::measure(in.r);
        if (in.N == 3) eq_tetra = std::max(eq_tetra, tetra_multitree_conditions(in.tree, e, in.w, in.K).first_order);
        if (in.N == 2) eq_plane = std::max(eq_plane, kplane_triangle_equations_residual(in.tree, e, in.w, in.K).max());
        if (in.K == 0.0) additivity = std::max(additivity, volume_additivity_check(in.tree, in.r));
    }
    v.require(n > 0, "no floating solution");
    v.require(eq_n <= 1e-7, "first-order residual above 1e-7");
    v.require(eq_tetra <= 1e-7, "tetrahedron first-order residual above 1e-7");
    v.require(eq_plane <= 1e-7, "K-plane triangle residual above 1e-7");
    v.require(additivity <= 1e-9, "volume additivity above 1e-9");
    v.detail << n << " trees; first-order " << eq_n << ", tetra " << eq_tetra << ", K-plane " << eq_plane
             << ", volumes " << additivity;
}

void formulas_vs_embedding(Verdict& v) {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> ua(0.05, kPi - 0.05);
    double worst = 0.0, worst_flat = 0.0, worst_trip = 0.0;
    for (double K : {0.0, 1.0, -1.0}) {
        for (int i = 0; i < 100; ++i) {
            const double R = K > 0 ? 0.4 : (K < 0 ? 0.6 : 1.0);
            const auto pts = oracle::random_simplex(g, 3, K, R, K > 0 ? kPi / (2 * std::sqrt(K)) : 100.0);
            const Vec A0 = oracle::random_point(g, 3, K, R);
            const EdgeTuple e = oracle::tuple_of(pts, K);
            const double a01 = oracle::dist(A0, pts[0], K), a02 = oracle::dist(A0, pts[1], K);
            const double a03 = oracle::dist(A0, pts[2], K), a04 = oracle::dist(A0, pts[3], K);
            const double alpha = oracle::dihedrals(pts[0], pts[1], pts[2], pts[3], A0, K).alpha;
            worst = std::max({worst, std::abs(a03_of(a01, a02, alpha, e, K) - a03),
                              std::abs(a04_of(a01, a02, alpha, e, K) - a04)});
            if (K == 0.0) {
                const FlatA03A04 f = euclidean_a03_a04(a01, a02, alpha, e);
                worst_flat = std::max({worst_flat, std::abs(f.a03 - a03), std::abs(f.a04 - a04)});
            }
            // elimination of a free dihedral angle
            const double al = ua(g);
            const double b3 = a03_of(a01, a02, al, e, K), b4 = a04_of(a01, a02, al, e, K);
            worst_trip = std::max(worst_trip, std::abs(eliminate_alpha(a01, a02, b3, e, K) - b4));
        }
    }
    v.require(worst <= 1e-9, "a03/a04 vs embedding above 1e-9");
    v.require(worst_flat <= 1e-9, "Euclidean a03/a04 vs embedding above 1e-9");
    v.require(worst_trip <= 1e-8, "alpha elimination round trip above 1e-8");
    v.detail << "a03/a04 " << worst << ", flat " << worst_flat << ", round trip " << worst_trip;
}

void curvature_recovery(Verdict& v) {
    std::mt19937_64 g(13);
    double worst = 0.0;
    int n = 0;
    for (double K : {0.5, -1.0}) {
        const CurvatureSign s = K > 0 ? CurvatureSign::positive : CurvatureSign::negative;
        for (int N : {2, 3}) {
            for (int i = 0; i < 50; ++i) {
                Weights w;
                const auto pts = oracle::fermat_configuration(g, N, K, K > 0 ? 0.5 : 0.6, w);
                const CurvatureEstimate e = estimate_curvature(CombinedTuple{oracle::tuple_of(pts, K), w}, s, 1e-3, 1e2);
                v.require(e.K.has_value(), "no curvature estimate");
                if (e.K) worst = std::max(worst, std::abs(*e.K - K) / std::abs(K));
                ++n;
            }
        }
    }
    v.require(worst <= 1e-6, "recovered K off by more than 1e-6 relative");
    const std::vector<double> lengths{1.0, 0.93, 0.88, 0.97, 0.91, 0.85};
    double spread = 0.0;
    for (double K : {0.5, -1.0}) {
        const MultitreeSolution ms = multitree_solve(lengths, Weights{1.0, 1.2, 0.9, 1.1}, CurvedSpace(K, 3));
        const CurvatureConsensus c = multitree_curvature_consensus(
            ms, K > 0 ? CurvatureSign::positive : CurvatureSign::negative, 1e-3, 1e2);
        v.require(c.estimates.size() >= 2, "multitree has fewer than two floating entries");
        v.require(std::abs(c.K - K) <= 1e-6 * std::abs(K), "consensus K off");
        spread = std::max(spread, c.spread / std::abs(K));
    }
    v.require(spread <= 1e-6, "multitree consensus spread above 1e-6");
    v.detail << n << " tuples, worst rel " << worst << "; consensus spread rel " << spread;
}

void inverse_round_trip(Verdict& v) {
    std::mt19937_64 g(17);
    std::exponential_distribution<double> ex(1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto pts = oracle::random_simplex(g, 3, 0.0, 1.0, 100.0);
        // interior point, every barycentric coordinate at least 0.03
        double b[4], s = 0.0;
        for (double& x : b) s += (x = ex(g));
        Vec A0 = Vec::Zero(3);
        for (int k = 0; k < 4; ++k) A0 += (0.03 + 0.88 * b[k] / s) * pts[k];
        const SimplexRealization r{CurvedSpace(0.0, 3), pts};
        const InverseResult inv = inverse_weights(A0, r, 1.0);
        const FermatTree t = solve_fermat(r, inv.weights);
        v.require(t.floating, "round trip tree absorbed");
        worst = std::max(worst, (t.point - A0).norm() / oracle::distances(pts, 0.0).maxCoeff());
    }
    v.require(worst <= 1e-6, "round trip distance above 1e-6 of the diameter");
    v.detail << "100 points, worst " << worst << " of diameter";
}

void infinity_limit(Verdict& v) {
    InfinityFamily f;
    f.a12 = 1.1, f.a13 = 1.3, f.a23 = 0.95;
    f.b = {1.0, 0.6, 0.8};
    f.c = {1.0, 1.2, 0.9};
    double prev = std::numeric_limits<double>::infinity();
    std::ostringstream ds;
    for (double M : {1e2, 1e4, 1e6}) {
        const InfinityTree t = solve_infinity_tree(f, M);
        v.require(t.tree.floating, "tree absorbed");
        v.require(t.foot_distance < prev, "distance to the planar point does not decrease");
        ds << t.foot_distance << " ";
        prev = t.foot_distance;
    }
    v.require(prev <= 1e-3 * f.diameter(), "distance at M = 1e6 above 1e-3 diameter");

    // balanced slopes: the limit weights are B_i(M) themselves, B_4 = 1
    InfinityFamily bal = f;
    bal.b = {2e-7, -1.5e-7, -0.5e-7};
    const Weights lim = infinity_limit_inverse(bal);
    const double C = 1.0 + bal.c[0] + bal.c[1] + bal.c[2];
    const Weights expect = bal.weights(bal.M);
    double gap = 0.0;
    for (int i = 0; i < 4; ++i) gap = std::max(gap, std::abs(lim[i] - expect[i]) / C);
    // and the weights that make the actual tree point stationary agree
    const InfinityTree t = solve_infinity_tree(bal, bal.M);
    const InverseResult inv = inverse_weights_tetrahedron(t.tree.point, infinity_tetrahedron(bal, bal.M), C);
    double gap_tree = 0.0;
    for (int i = 0; i < 4; ++i) gap_tree = std::max(gap_tree, std::abs(inv.weights[i] - lim[i]) / C);
    v.require(gap <= 1e-4, "limit weights differ from B_i(M)");
    v.require(gap_tree <= 1e-4, "limit weights differ from the tree point inverse");
    v.detail << "distances " << ds.str() << "; weights " << gap << ", tree " << gap_tree;
}

void continuity(Verdict& v) {
    double worst = 0.0;
    for (int N = 2; N <= 7; ++N) {
        const double e = lambda_euclidean(1.0, N);
        worst = std::max({worst, std::abs(lambda_hyperbolic(1.0, N, -1e-6) / e - 1),
                          std::abs(lambda_spherical(1.0, N, 1e-6) / e - 1)});
    }
    v.require(worst <= 1e-5, "curved lambda_N differs from Euclidean by more than 1e-5");
    // cosine law: |cos_K - cos_0| / |K| is the same constant at K and K/100
    std::mt19937_64 g(19);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::vector<std::array<double, 3>> tri;
    while (tri.size() < 50) {
        const double a = u(g), b = u(g), c = u(g);
        if (a + b > 1.05 * c && a + c > 1.05 * b && b + c > 1.05 * a) tri.push_back({a, b, c});
    }
    auto slope = [&](double K) {
        double w = 0.0;
        for (auto& t : tri)
            w = std::max(w, std::abs(cos_vertex_angle(t[0], t[1], t[2], CurvedSpace(K, 2)) -
                                     std::cos(oracle::angle(t[0], t[1], t[2], 0.0))) /
                                std::abs(K));
        return w;
    };
    double ratio_dev = 0.0;
    for (double s : {1.0, -1.0}) {
        const double c1 = slope(s * 1e-4), c2 = slope(s * 1e-6);
        v.require(c1 < 10.0, "cosine-law error not O(K)");
        ratio_dev = std::max(ratio_dev, std::abs(c2 / c1 - 1));
    }
    v.require(ratio_dev <= 0.05, "cosine-law error does not scale linearly in K");
    v.detail << "lambda rel " << worst << "; O(K) slope ratio deviation " << ratio_dev;
}

void immersion(Verdict& v) {
    std::mt19937_64 g(23);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int found = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
        // 4 points on the sphere of radius rho in R^4: a tree point plus triangle
        const double rho = 0.5 + 2.0 * u(g);
        std::vector<Vec> pts;
        while (pts.size() < 4) {
            Vec x(4);
            for (int k = 0; k < 4; ++k) x[k] = n(g);
            x.normalize();
            if (x[0] >= std::cos(1.0)) pts.push_back(rho * x);
        }
        Mat d = Mat::Zero(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                d(a, b) = d(b, a) = 2 * rho * std::asin(std::min(1.0, (pts[a] - pts[b]).norm() / (2 * rho)));
        const EdgeTuple t(d);
        v.require(schoenberg_spherical(t, rho, 4).realizable, "not realizable at the true radius");
        const RhoSearch s = schoenberg_rho_search(t, 1.0001 * t.ell() / kPi, 10 * rho);
        if (!s.rho0) {
            v.require(false, "radius search found nothing: " + s.cause);
            continue;
        }
        ++found;
        v.require(*s.rho0 <= rho * (1 + 1e-9), "rho0 above the true radius");
        margin = std::min(margin, rho / *s.rho0 - 1);
    }
    // sweeps
    const EdgeTuple base = EdgeTuple::from_upper({1, 0.95, 0.92, 0.97, 0.9, 0.96}, 4);
    const Weights w{1.0, 1.2, 0.9, 1.1};
    const auto base_edges = base.upper();
    const double base_sum = std::accumulate(base_edges.begin(), base_edges.end(), 0.0);
    double drift = 0.0;
    std::uniform_real_distribution<double> ue(-1e-3, 1e-3);
    for (double K : {0.0, 0.5, -1.0}) {
        std::vector<Mat> eps{Mat::Zero(4, 4)};
        for (int i = 0; i < 20; ++i) {
            Mat e = Mat::Zero(4, 4);
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) s += (e(a, b) = ue(g));
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) e(b, a) = (e(a, b) -= s / 6);
            eps.push_back(e);
        }
        const SweepReport rep = isoperimetric_perturbation_sweep(base, eps, w, CurvedSpace(K, 3));
        drift = std::max(drift, rep.max_sum_drift);
        // recomputed independently from the rows
        for (const SweepRow& row : rep.rows) {
            const auto up = row.edges.upper();
            drift = std::max(drift, std::abs(std::accumulate(up.begin(), up.end(), 0.0) - base_sum));
        }
    }
    v.require(drift <= 1e-12, "edge sum drift above 1e-12");
    v.detail << found << "/50 radii found, min rho*/rho0 - 1 = " << margin << "; sum drift " << drift;
}

void series(Verdict& v) {
    bool monotone = true;
    double prev = 0.0;
    for (long k = 0; k < 40; ++k) {
        const double x = milnor_ideal_regular_partial(3, k);
        monotone = monotone && x > prev;
        prev = x;
    }
    const SeriesResult r = milnor_ideal_regular_bound(3, 1e-11);
    const double ideal = std::abs(milnor_ideal_regular_partial(3, r.shells - 1) -
                                  milnor_ideal_regular_partial(3, r.shells + 4));
    const auto a = orthosimplex_coordinates({0.3, 0.2, 0.25}, -1.0);
    prev = -1.0;
    for (long k = 0; k < 20; ++k) {
        const double x = milnor_orthosimplex_partial(a, -1.0, k);
        monotone = monotone && x >= prev;
        prev = x;
    }
    const SeriesResult o = milnor_orthosimplex_volume(a, -1.0, 1e-12);
    const double ortho = std::abs(milnor_orthosimplex_partial(a, -1.0, o.shells - 1) -
                                  milnor_orthosimplex_partial(a, -1.0, o.shells + 4));
    v.require(monotone, "partial sums not monotone");
    v.require(ideal <= 1e-10, "ideal regular series moves by more than 1e-10 over 5 shells");
    v.require(ortho <= 1e-10, "orthosimplex series moves by more than 1e-10 over 5 shells");
    v.detail << "ideal N=3 depth " << r.shells << " step " << ideal << "; orthosimplex depth " << o.shells
             << " step " << ortho;
}

} // namespace

int main() {
    int failed = 0;
    failed += run(1, "enumeration count", 5.0, enumeration_count);
    failed += run(2, "solver correctness", 60.0, solver_correctness);
    failed += run(3, "first-order identities", 0.0, first_order_identities);
    failed += run(4, "formulas vs embedding", 0.0, formulas_vs_embedding);
    failed += run(5, "curvature recovery", 0.0, curvature_recovery);
    failed += run(6, "inverse round trip", 0.0, inverse_round_trip);
    failed += run(7, "infinity limit", 0.0, infinity_limit);
    failed += run(8, "DW / limit continuity", 0.0, continuity);
    failed += run(9, "immersion", 0.0, immersion);
    failed += run(10, "series", 0.0, series);
    std::printf("%d of 10 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
