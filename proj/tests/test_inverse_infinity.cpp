#include "doctest.h"
#include "oracles.hpp"

#include "ffm/errors.hpp"
#include "ffm/inverse_infinity.hpp"

#include <numeric>
#include <random>

using namespace ffm;

namespace {

// Convex combination with every barycentric coordinate at least lo.
Vec interior_point(std::mt19937_64& g, const std::vector<Vec>& pts, double lo) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> b(pts.size());
    double s = 0.0;
    for (double& x : b) s += (x = e(g));
    Vec p = Vec::Zero(pts[0].size());
    const double rest = 1.0 - lo * static_cast<double>(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) p += (lo + rest * b[i] / s) * pts[i];
    return p;
}

double diameter(const std::vector<Vec>& pts) { return oracle::distances(pts, 0.0).maxCoeff(); }

// Triangle A_1 at the origin, A_3 on the x axis, A_2 above.
std::vector<Vec> planar_triangle(double a12, double a13, double a23) {
    const double c = (a12 * a12 + a13 * a13 - a23 * a23) / (2 * a12 * a13);
    const double g = std::acos(c);
    std::vector<Vec> t(3, Vec::Zero(2));
    t[1] << a12 * std::cos(g), a12 * std::sin(g);
    t[2] << a13, 0.0;
    return t;
}

InfinityFamily generic_family() {
    InfinityFamily f;
    f.a12 = 1.1;
    f.a13 = 1.3;
    f.a23 = 0.95;
    f.b = {1.0, 0.6, 0.8};
    f.c = {1.0, 1.2, 0.9};
    return f;
}

} // namespace

TEST_CASE("planar phi for the equilateral triangle") {
    const PlanarFermatSolution p = planar_fermat_phi(1, 1, M_PI / 3, {1, 1, 1});
    CHECK(p.phi == doctest::Approx(M_PI / 6).epsilon(1e-14));
    for (double b : p.branches) CHECK(b == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(planar_fermat_phi(1, 1, M_PI / 3, {5, 1, 1}), Infeasible);
    CHECK_THROWS_AS(planar_fermat_phi(1, 1, 0.0, {1, 1, 1}), InvalidInput);
}

TEST_CASE("planar phi agrees with the solver and the grid") {
    std::mt19937_64 g(71);
    std::uniform_real_distribution<double> u(0.5, 2.0), s(0.6, 1.4);
    int n = 0;
    while (n < 50) {
        const double a12 = s(g), a13 = s(g), a23 = s(g);
        if (a12 + a13 < 1.05 * a23 || a12 + a23 < 1.05 * a13 || a13 + a23 < 1.05 * a12) continue;
        const Weights w{u(g), u(g), u(g)};
        const auto tri = planar_triangle(a12, a13, a23);
        const SimplexRealization r{CurvedSpace(0.0, 2), tri};
        if (!classify(r, w).floating) {
            CHECK_THROWS_AS(planar_fermat_phi(a12, a13, std::acos(tri[1][0] / a12), w), Infeasible);
            continue;
        }
        ++n;
        const PlanarFermatSolution p = planar_fermat_phi(a12, a13, std::acos(tri[1][0] / a12), w);
        const FermatTree t = solve_fermat(r, w);
        Vec x(2);
        x << p.branches[0] * std::cos(p.phi), p.branches[0] * std::sin(p.phi);
        CHECK((x - t.point).norm() <= 1e-8 * diameter(tri));
        for (int i = 0; i < 3; ++i) CHECK(p.branches[i] == doctest::Approx(t.branches[i]).epsilon(1e-8));
    }
    // weights (1.5, 1, 1) on the unit equilateral triangle against the grid
    const auto tri = planar_triangle(1, 1, 1);
    const PlanarFermatSolution p = planar_fermat_phi(1, 1, M_PI / 3, {1.5, 1, 1});
    const auto gm = oracle::grid_refine(tri, {1.5, 1, 1}, 0.0, 60);
    REQUIRE(gm.vertex < 0);
    CHECK(p.branches[0] == doctest::Approx(gm.point.norm()).epsilon(1e-6));
    CHECK(p.phi == doctest::Approx(std::atan2(gm.point[1], gm.point[0])).epsilon(1e-6));
    // (2, 1, 1) sits on the absorbing boundary: the grid lands on A_1
    CHECK_THROWS_AS(planar_fermat_phi(1, 1, M_PI / 3, {2, 1, 1}), Infeasible);
    CHECK(oracle::grid_refine(tri, {2, 1, 1}, 0.0, 60).vertex == 0);
}

TEST_CASE("tetrahedron inverse at the regular centroid") {
    std::vector<Vec> R(4, Vec(3));
    R[0] << 1, 1, 1;
    R[1] << 1, -1, -1;
    R[2] << -1, 1, -1;
    R[3] << -1, -1, 1;
    const SimplexRealization r{CurvedSpace(0.0, 3), R};
    const InverseResult inv = inverse_weights_tetrahedron(Vec::Zero(3), r, 4.0);
    for (double b : inv.weights) CHECK(b == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inv.conditioning == doctest::Approx(1.0));
    CHECK(inv.balance < 1e-15);
}

TEST_CASE("inverse round trip, Euclidean tetrahedra") {
    std::mt19937_64 g(72);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto pts = oracle::random_simplex(g, 3, 0.0, 1.0, 100.0);
        const Vec A0 = interior_point(g, pts, 0.03);
        const SimplexRealization r{CurvedSpace(0.0, 3), pts};
        const InverseResult inv = inverse_weights_tetrahedron(A0, r, 2.5);
        CHECK(std::accumulate(inv.weights.begin(), inv.weights.end(), 0.0) == doctest::Approx(2.5).epsilon(1e-14));
        const FermatTree t = solve_fermat(r, inv.weights);
        REQUIRE(t.floating);
        worst = std::max(worst, (t.point - A0).norm() / diameter(pts));
        // ratios do not depend on the budget
        const InverseResult other = inverse_weights_tetrahedron(A0, r, 7.0);
        for (int k = 0; k < 4; ++k) CHECK(other.weights[k] / inv.weights[k] == doctest::Approx(7.0 / 2.5).epsilon(1e-13));
        // the general null-space method gives the same weights
        const InverseResult svd = inverse_weights(A0, r, 2.5);
        for (int k = 0; k < 4; ++k) CHECK(svd.weights[k] == doctest::Approx(inv.weights[k]).epsilon(1e-9));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("inverse round trip, triangles and curved tetrahedra") {
    std::mt19937_64 g(73);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto pts = oracle::random_simplex(g, 2, 0.0, 1.0, 100.0);
        const Vec A0 = interior_point(g, pts, 0.03);
        const SimplexRealization r{CurvedSpace(0.0, 2), pts};
        const FermatTree t = solve_fermat(r, inverse_weights_triangle(A0, r, 1.0).weights);
        REQUIRE(t.floating);
        worst = std::max(worst, (t.point - A0).norm() / diameter(pts));
    }
    CHECK(worst <= 1e-8);

    for (double K : {1.0, -1.0}) {
        for (int i = 0; i < 20; ++i) {
            const auto pts = oracle::random_simplex(g, 3, K, K > 0 ? 0.25 : 0.5, 100.0);
            std::vector<Vec> flat;
            for (const Vec& p : pts) flat.push_back(oracle::unchart(p, K));
            // geodesic charts keep convex hulls, so a chart-interior point is interior
            const Vec A0 = oracle::chart(interior_point(g, flat, 0.05), K);
            const SimplexRealization r{CurvedSpace(K, 3), pts};
            const FermatTree t = solve_fermat(r, inverse_weights(A0, r, 1.0).weights);
            REQUIRE(t.floating);
            CHECK(oracle::dist(t.point, A0, K) <= 1e-6 * oracle::distances(pts, K).maxCoeff());
        }
    }
}

TEST_CASE("inverse of classical points and of bad points") {
    // equal-weight Fermat point of a triangle with all angles below 120 degrees
    const auto tri = planar_triangle(1.0, 1.2, 0.9);
    const SimplexRealization r{CurvedSpace(0.0, 2), tri};
    const FermatTree t = solve_fermat(r, {1, 1, 1});
    for (double b : inverse_weights_triangle(t.point, r, 3.0).weights) CHECK(b == doctest::Approx(1.0).epsilon(1e-8));
    const Vec centroid = (tri[0] + tri[1] + tri[2]) / 3;
    const auto eq = planar_triangle(1, 1, 1);
    const SimplexRealization re{CurvedSpace(0.0, 2), eq};
    for (double b : inverse_weights_triangle((eq[0] + eq[1] + eq[2]) / 3, re, 3.0).weights)
        CHECK(b == doctest::Approx(1.0).epsilon(1e-14));

    // outside the hull, on an edge, at a vertex
    Vec out(2);
    out << -0.5, -0.5;
    CHECK_THROWS_AS(inverse_weights_triangle(out, r, 1.0), Infeasible);
    CHECK_THROWS_AS(inverse_weights_triangle(0.5 * (tri[0] + tri[2]), r, 1.0), Infeasible);
    CHECK_THROWS_AS(inverse_weights_triangle(tri[1], r, 1.0), Infeasible);
    // close to a face the smallest weight collapses
    const Vec near = 0.5 * (tri[0] + tri[2]) + 1e-7 * (centroid - 0.5 * (tri[0] + tri[2]));
    const InverseResult inv = inverse_weights_triangle(near, r, 1.0);
    CHECK(inv.conditioning < 1e-5);
    CHECK_THROWS_AS(inverse_weights_triangle(centroid, r, 0.0), InvalidInput);
}

TEST_CASE("five-point inverse uses the null space") {
    std::mt19937_64 g(74);
    for (int i = 0; i < 10; ++i) {
        const auto pts = oracle::random_simplex(g, 4, 0.0, 1.0, 100.0);
        const Vec A0 = interior_point(g, pts, 0.05);
        const SimplexRealization r{CurvedSpace(0.0, 4), pts};
        const InverseResult inv = inverse_weights(A0, r, 1.0);
        CHECK(inv.balance < 1e-12);
        const FermatTree t = solve_fermat(r, inv.weights);
        CHECK((t.point - A0).norm() <= 1e-6 * diameter(pts));
    }
}

TEST_CASE("distances to the vertex above the triangle") {
    const InfinityFamily f = generic_family();
    const InfinityDistances d0 = infinity_distances(f, 0.0);
    for (int i = 0; i < 3; ++i) CHECK(d0.a4[i] == doctest::Approx(d0.planar.branches[i]).epsilon(1e-15));
    for (double M : {10.0, 1e3}) {
        const InfinityDistances d = infinity_distances(f, M);
        const SimplexRealization r = infinity_tetrahedron(f, M);
        const Mat a = oracle::distances(r.vertices, 0.0);
        for (int i = 0; i < 3; ++i) CHECK(d.a4[i] == doctest::Approx(a(3, i)).epsilon(1e-12));
        // A_4 stands on A_{0,123} at a right angle to the triangle
        const Vec foot = planar_fermat_point(f, M);
        for (int i = 0; i < 3; ++i) CHECK(std::abs((r.vertices[3] - foot).dot(r.vertices[i] - foot)) < 1e-9 * M);
        const oracle::LineFoot lf = oracle::line_foot(r.vertices[0], r.vertices[1], r.vertices[3], 0.0, 10.0);
        CHECK(d.h412 == doctest::Approx(lf.h).epsilon(1e-10));
        const EdgeTuple e = EdgeTuple(a);
        CHECK(d.alpha_g4 == doctest::Approx(tetra_angles(e, 0.0).alpha_g4).epsilon(1e-9));
    }
    // a_4i = M + a_i^2 / (2M) + O(M^-3)
    const double M = 1e4;
    const InfinityDistances d = infinity_distances(f, M);
    for (int i = 0; i < 3; ++i) {
        const double ai = d.planar.branches[i];
        CHECK(std::abs(d.a4[i] - (M + ai * ai / (2 * M))) < 1e-9);
    }
}

TEST_CASE("tree point approaches the planar Fermat point") {
    const InfinityFamily f = generic_family();
    double prev = std::numeric_limits<double>::infinity();
    for (double M : {1e2, 1e4, 1e6}) {
        const InfinityTree t = solve_infinity_tree(f, M);
        REQUIRE(t.tree.floating);
        CHECK(t.foot_distance < prev);
        CHECK(t.foot_distance * M < 10.0 * f.diameter());
        prev = t.foot_distance;
        // angle A_4 A_0 A_i tends to a right angle
        const SimplexRealization r = infinity_tetrahedron(f, M);
        const Vec up = (r.vertices[3] - t.tree.point).normalized();
        for (int i = 0; i < 3; ++i) {
            const double c = up.dot((r.vertices[i] - t.tree.point).normalized());
            CHECK(std::abs(c) < 10.0 / M);
        }
    }
    CHECK(prev <= 1e-3 * f.diameter());
    const InfinityTree mid = solve_infinity_tree(f, 1e2);
    CHECK(mid.conditions.volumes_checked);
    CHECK(mid.conditions.max_tetraed() <= 1e-6);
    CHECK(mid.conditions.first_order <= 1e-7);
}

TEST_CASE("symmetric family keeps the tree on the axis") {
    InfinityFamily f;
    f.b = {0.5, 0.5, 0.5};
    for (double M : {1.0, 1e3}) {
        const InfinityTree t = solve_infinity_tree(f, M);
        const SimplexRealization r = infinity_tetrahedron(f, M);
        const Vec c = (r.vertices[0] + r.vertices[1] + r.vertices[2]) / 3;
        CHECK(std::hypot(t.tree.point[0] - c[0], t.tree.point[1] - c[1]) < 1e-9);
    }
}

TEST_CASE("limit weights") {
    InfinityFamily sym;
    sym.c = {0.8, 0.8, 0.8};
    const Weights ws = infinity_limit_inverse(sym);
    for (int i = 0; i < 3; ++i) CHECK(ws[i] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(ws[3] == 1.0);

    CHECK_THROWS_AS(infinity_limit_inverse(generic_family()), InvalidInput);
    CHECK_NOTHROW(infinity_limit_inverse(generic_family(), false));

    // balanced slopes small enough to keep every weight positive at M
    InfinityFamily f = generic_family();
    f.b = {2e-7, -1.5e-7, -0.5e-7};
    const Weights lim = infinity_limit_inverse(f);
    const double C = 1.0 + f.c[0] + f.c[1] + f.c[2];
    CHECK(std::accumulate(lim.begin(), lim.end(), 0.0) == doctest::Approx(C).epsilon(1e-12));
    const InfinityTree t = solve_infinity_tree(f, f.M);
    const InverseResult inv = inverse_weights_tetrahedron(t.tree.point, infinity_tetrahedron(f, f.M), C);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(inv.weights[i] - lim[i]) <= 1e-4 * C);
}
