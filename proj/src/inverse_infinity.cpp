#include "ffm/inverse_infinity.hpp"
#include "ffm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ffm {

namespace {

double weight_cos(double Bk, double Bi, double Bj) { return (Bk * Bk - Bi * Bi - Bj * Bj) / (2.0 * Bi * Bj); }

// Unit tangent directions at A_0 towards each vertex, in an orthonormal frame of T_{A_0}.
Mat unit_directions(const Vec& A0, const SimplexRealization& r) {
    const CurvedSpace& sp = r.space;
    check_point(A0, sp);
    const Mat basis = tangent_basis(A0, sp);
    Mat U(sp.N, r.size());
    for (int i = 0; i < r.size(); ++i) {
        const Vec v = log_map(A0, r.vertices[i], sp);
        const double n = tangent_norm(v, sp);
        if (!(n > 0.0)) throw Infeasible("A_0 coincides with a vertex");
        for (int k = 0; k < sp.N; ++k) U(k, i) = model_inner(basis.col(k), v, sp) / n;
    }
    return U;
}

InverseResult finish(const Weights& raw, const Mat& U, double Csum) {
    if (!(Csum > 0.0)) throw InvalidInput("weight sum must be positive");
    const double mx = *std::max_element(raw.begin(), raw.end());
    const double mn = *std::min_element(raw.begin(), raw.end());
    if (!(mx > 0.0) || mn <= 1e-12 * mx) throw Infeasible("A_0 lies on a face of the simplex");
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    InverseResult out;
    out.conditioning = mn / mx;
    Vec s = Vec::Zero(U.rows());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out.weights.push_back(Csum * raw[i] / total);
        s += raw[i] / total * U.col(static_cast<int>(i));
    }
    out.balance = s.norm();
    if (out.balance > 1e-6) throw Infeasible("A_0 is not interior: no positive weights balance it");
    return out;
}

} // namespace

PlanarFermatSolution planar_fermat_phi(double a12, double a13, double angle213, const Weights& w3) {
    check_weights(w3, 3);
    if (!(a12 > 0.0) || !(a13 > 0.0)) throw InvalidInput("triangle sides must be positive");
    if (!(angle213 > 0.0 && angle213 < M_PI)) throw InvalidInput("angle at A_1 must lie in (0, pi)");
    const double B1 = w3[0], B2 = w3[1], B3 = w3[2];
    const double c3 = weight_cos(B3, B1, B2);  // cos of angle A_1 A_0 A_2
    const double c2 = weight_cos(B2, B1, B3);  // cos of angle A_1 A_0 A_3
    if (std::abs(c3) >= 1.0 || std::abs(c2) >= 1.0) throw Infeasible("weights admit no floating planar tree");
    const double th3 = std::acos(c3), th2 = std::acos(c2);
    const double sa = std::sin(angle213), ca = std::cos(angle213);
    const double ratio = a13 / a12;
    const double num = sa - ca / std::tan(th3) - ratio / std::tan(th2);
    const double den = -ca - sa / std::tan(th3) + ratio;
    PlanarFermatSolution out;
    out.phi = std::atan2(den, num);  // arccot(num/den) in (0, pi)
    if (out.phi < 0.0) out.phi += M_PI;
    if (!(out.phi > 0.0 && out.phi < angle213)) throw Infeasible("planar Fermat point is not interior (absorbed case)");
    const double a1 = std::sin(out.phi + th2) * a13 / std::sin(th2);
    if (!(a1 > 0.0)) throw Infeasible("planar Fermat point is not interior (absorbed case)");
    out.branches[0] = a1;
    out.branches[1] = std::sqrt(std::max(0.0, a1 * a1 + a12 * a12 - 2.0 * a1 * a12 * std::cos(angle213 - out.phi)));
    out.branches[2] = std::sqrt(std::max(0.0, a1 * a1 + a13 * a13 - 2.0 * a1 * a13 * std::cos(out.phi)));
    // phi only fixes the direction from A_1; an absorbed configuration can still
    // land inside the angle, so confirm the angle A_1 A_0 A_2 the weights demand
    const double a2 = out.branches[1];
    if (!(a2 > 0.0) || std::abs((a1 * a1 + a2 * a2 - a12 * a12) / (2.0 * a1 * a2) - c3) > 1e-6)
        throw Infeasible("planar Fermat point is not interior (absorbed case)");
    return out;
}

InverseResult inverse_weights_tetrahedron(const Vec& A0, const SimplexRealization& r, double Csum) {
    if (r.size() != 4 || r.space.N != 3) throw InvalidInput("tetrahedron inverse needs four vertices in dimension 3");
    const Mat U = unit_directions(A0, r);
    const Mat C = U.transpose() * U;  // cos of the angles A_i A_0 A_j
    // Gram determinant of the three directions other than j; B_j is proportional to its root
    Weights raw(4);
    for (int j = 0; j < 4; ++j) {
        int o[3], n = 0;
        for (int i = 0; i < 4; ++i)
            if (i != j) o[n++] = i;
        const double ckm = C(o[0], o[2]), cmi = C(o[2], o[1]), cki = C(o[0], o[1]);
        const double g = 1.0 - ckm * ckm - cmi * cmi - cki * cki + 2.0 * ckm * cmi * cki;
        raw[j] = std::sqrt(std::abs(g));
    }
    return finish(raw, U, Csum);
}

InverseResult inverse_weights_triangle(const Vec& A0, const SimplexRealization& r, double Csum) {
    if (r.size() != 3 || r.space.N != 2) throw InvalidInput("triangle inverse needs three vertices in dimension 2");
    const Mat U = unit_directions(A0, r);
    Weights raw(3);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        raw[i] = std::sqrt(std::max(0.0, 1.0 - std::pow(U.col(j).dot(U.col(k)), 2)));
    }
    return finish(raw, U, Csum);
}

InverseResult inverse_weights(const Vec& A0, const SimplexRealization& r, double Csum) {
    if (r.size() != r.space.N + 1) throw InvalidInput("inverse problem needs N + 1 vertices");
    if (r.size() == 3) return inverse_weights_triangle(A0, r, Csum);
    if (r.size() == 4) return inverse_weights_tetrahedron(A0, r, Csum);
    const Mat U = unit_directions(A0, r);
    Eigen::JacobiSVD<Mat> svd(U, Eigen::ComputeFullV);
    Vec z = svd.matrixV().col(r.size() - 1);
    if (z.sum() < 0.0) z = -z;
    return finish(Weights(z.data(), z.data() + z.size()), U, Csum);
}

Weights InfinityFamily::triangle_weights(double m) const {
    Weights w(3);
    for (int i = 0; i < 3; ++i) {
        w[i] = b[i] * m + c[i];
        if (!(w[i] > 0.0)) throw InvalidInput("family weights must be positive at the evaluated M");
    }
    return w;
}

Weights InfinityFamily::weights(double m) const {
    Weights w = triangle_weights(m);
    w.push_back(1.0);
    return w;
}

double InfinityFamily::diameter() const { return std::max({a12, a13, a23}); }

namespace {

double angle_at_a1(const InfinityFamily& f) {
    const CurvedSpace sp(0.0, 2);
    return std::acos(cos_vertex_angle(f.a12, f.a13, f.a23, sp));
}

} // namespace

Vec planar_fermat_point(const InfinityFamily& fam, double M) {
    const PlanarFermatSolution p = planar_fermat_phi(fam.a12, fam.a13, angle_at_a1(fam), fam.triangle_weights(M));
    Vec x(3);
    x << p.branches[0] * std::cos(p.phi), p.branches[0] * std::sin(p.phi), 0.0;
    return x;
}

SimplexRealization infinity_tetrahedron(const InfinityFamily& fam, double M) {
    if (!(M >= 0.0)) throw InvalidInput("M must be nonnegative");
    const double g = angle_at_a1(fam);
    SimplexRealization r{CurvedSpace(0.0, 3), {}};
    Vec a1 = Vec::Zero(3), a2(3), a3(3);
    a2 << fam.a12 * std::cos(g), fam.a12 * std::sin(g), 0.0;
    a3 << fam.a13, 0.0, 0.0;
    Vec a4 = planar_fermat_point(fam, M);
    a4[2] = M;
    r.vertices = {a1, a2, a3, a4};
    return r;
}

InfinityDistances infinity_distances(const InfinityFamily& fam, double M) {
    const double g = angle_at_a1(fam);
    InfinityDistances out;
    out.planar = planar_fermat_phi(fam.a12, fam.a13, g, fam.triangle_weights(M));
    const auto& a = out.planar.branches;
    for (int i = 0; i < 3; ++i) out.a4[i] = std::hypot(M, a[i]);
    // foot of A_{0,123} on A_1A_2: signed distance l from A_2 towards A_1 and offset delta
    const double a12 = fam.a12, a23 = fam.a23;
    const double l = (a12 * a12 + a[1] * a[1] - a[0] * a[0]) / (2.0 * a12);
    const double delta = std::sqrt(std::max(0.0, a[1] * a[1] - l * l));
    out.h412 = std::hypot(M, delta);
    const double cos123 = (a12 * a12 + a23 * a23 - fam.a13 * fam.a13) / (2.0 * a12 * a23);
    const double sin123 = std::sqrt(std::max(0.0, 1.0 - cos123 * cos123));
    // a42^2 - a43^2 = a2^2 - a3^2 keeps the large M^2 terms out of the numerator
    const double num = (a[1] * a[1] + a23 * a23 - a[2] * a[2]) / (2.0 * a23) - l * cos123;
    out.alpha_g4 = std::acos(std::clamp(num / (out.h412 * sin123), -1.0, 1.0));
    return out;
}

InfinityTree solve_infinity_tree(const InfinityFamily& fam, double M, const SolverOptions& opts) {
    const SimplexRealization r = infinity_tetrahedron(fam, M);
    const Weights w = fam.weights(M);
    InfinityTree out;
    out.tree = solve_fermat(r, w, opts);
    out.foot = r.vertices[3];
    out.foot[2] = 0.0;
    out.foot_distance = (out.tree.point - out.foot).norm();
    if (out.tree.floating) out.conditions = tetra_multitree_conditions(out.tree, EdgeTuple::measure(r), w, 0.0);
    return out;
}

Weights infinity_limit_inverse(const InfinityFamily& fam, bool require_balanced) {
    const double bsum = fam.b[0] + fam.b[1] + fam.b[2];
    if (require_balanced && std::abs(bsum) > 1e-12 * (std::abs(fam.b[0]) + std::abs(fam.b[1]) + std::abs(fam.b[2]) + 1e-300))
        throw InvalidInput("limit formula requires b_1 + b_2 + b_3 = 0");
    const Weights tw = fam.triangle_weights(fam.M);
    const double C = 1.0 + std::accumulate(tw.begin(), tw.end(), 0.0);
    const SimplexRealization tet = infinity_tetrahedron(fam, fam.M);
    SimplexRealization tri{CurvedSpace(0.0, 2), {}};
    for (int i = 0; i < 3; ++i) tri.vertices.push_back(tet.vertices[i].head(2));
    const Vec foot = tet.vertices[3].head(2);
    Weights w = inverse_weights_triangle(foot, tri, C - 1.0).weights;
    w.push_back(1.0);
    return w;
}

} // namespace ffm
