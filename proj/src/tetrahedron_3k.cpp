#include "ffm/tetrahedron_3k.hpp"
#include "ffm/errors.hpp"
#include "ffm/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ffm {

namespace {

void check_edges(const EdgeTuple& e) {
    if (e.m() != 4) throw InvalidInput("tetrahedron formulas need four vertices");
}

double safe_acos(double c, const char* what) {
    if (c > 1.0 + 1e-9 || c < -1.0 - 1e-9) throw Infeasible(what);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// tan/tanh of kx; x for K = 0
double tan_k(double x, const CurvedSpace& sp) {
    const double t = sp.kappa() * x;
    if (sp.spherical()) return std::tan(t);
    if (sp.hyperbolic()) return std::tanh(t);
    return x;
}

// inverses of sin_k / tan_k / cos_k, returning lengths
double asin_k(double s, const CurvedSpace& sp) {
    const double k = sp.kappa();
    if (sp.spherical()) return std::asin(std::clamp(s, -1.0, 1.0)) / k;
    return std::asinh(s) / k;
}

double atan_k(double t, const CurvedSpace& sp) {
    const double k = sp.kappa();
    if (sp.spherical()) return std::atan(t) / k;
    if (std::abs(t) >= 1.0) throw Infeasible("tanh argument out of range");
    return std::atanh(t) / k;
}

// Kahan's stable Heron area.
double heron(double a, double b, double c) {
    double s[3] = {a, b, c};
    std::sort(s, s + 3, std::greater<double>());
    a = s[0], b = s[1], c = s[2];
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if (p < 0.0) {
        if (p < -1e-12 * a * a * a * a) throw Infeasible("triangle inequality violated");
        return 0.0;
    }
    return 0.25 * std::sqrt(p);
}

double angle(double a, double b, double c, const CurvedSpace& sp) { return std::acos(cos_vertex_angle(a, b, c, sp)); }

// cos of the spherical-link dihedral at a vertex from its three face angles
double dihedral_from_face_angles(double opposite, double f1, double f2) {
    return safe_acos((std::cos(opposite) - std::cos(f1) * std::cos(f2)) / (std::sin(f1) * std::sin(f2)),
                     "face angles do not bound a trihedral angle");
}

// |1 - cos_k(x)|, cancellation free
double vers_k(double x, const CurvedSpace& sp) {
    const double t = 0.5 * sp.kappa() * x;
    if (sp.spherical()) return 2.0 * std::sin(t) * std::sin(t);
    return 2.0 * std::sinh(t) * std::sinh(t);
}

// length with vers_k equal to v
double avers_k(double v, const CurvedSpace& sp) {
    if (v < -1e-15) throw Infeasible("cosine of a length out of range");
    const double r = std::sqrt(std::max(0.0, 0.5 * v));
    if (sp.spherical()) {
        if (r > 1.0 + 1e-9) throw Infeasible("cosine of a length out of range");
        return 2.0 * std::asin(std::min(1.0, r)) / sp.kappa();
    }
    return 2.0 * std::asinh(r) / sp.kappa();
}

// Length a0j for the vertex at dihedral offset phi from plane (A_1 A_2 A_0),
// face angle alpha12j at A_2. Curved case:
// C(a0j) = C(a02)C(a2j) + sigma S(a2j)(cos alpha12j C(h) S(l) + sin alpha12j S(h) cos phi),
// evaluated as a versine so that small kappa keeps full precision.
double cos_a0j(double a02, double a2j, double alpha12j, double cos_offset, const TetraPoint& p, const CurvedSpace& sp) {
    if (sp.flat()) {
        const double sq = a02 * a02 + a2j * a2j -
                          2.0 * a2j * (p.l * std::cos(alpha12j) + p.h012 * std::sin(alpha12j) * cos_offset);
        return std::sqrt(std::max(0.0, sq));
    }
    const double x = std::cos(alpha12j) * cos_k(p.h012, sp) * sin_k(p.l, sp) +
                     std::sin(alpha12j) * sin_k(p.h012, sp) * cos_offset;
    const double v = vers_k(a02, sp) + cos_k(a02, sp) * vers_k(a2j, sp) - sin_k(a2j, sp) * x;
    return avers_k(v, sp);
}

} // namespace

TetraAngles tetra_angles(const EdgeTuple& e, double K) {
    check_edges(e);
    const CurvedSpace sp(K, 3);
    TetraAngles t;
    t.alpha123 = angle(e(0, 1), e(1, 2), e(0, 2), sp);
    t.alpha124 = angle(e(0, 1), e(1, 3), e(0, 3), sp);
    t.alpha324 = angle(e(1, 2), e(1, 3), e(2, 3), sp);
    t.alpha_g4 = dihedral_from_face_angles(t.alpha324, t.alpha123, t.alpha124);
    return t;
}

double h012(double a01, double a02, double a12, double K) {
    if (!(a01 > 0.0) || !(a02 > 0.0) || !(a12 > 0.0)) throw InvalidInput("h012 needs positive lengths");
    if (K == 0.0) return 2.0 * heron(a01, a02, a12) / a12;
    const CurvedSpace sp(K, 2);
    const double c102 = cos_vertex_angle(a01, a02, a12, sp);
    const double s102 = std::sqrt(std::max(0.0, 1.0 - c102 * c102));
    return asin_k(sin_k(a01, sp) * sin_k(a02, sp) / sin_k(a12, sp) * s102, sp);
}

TetraPoint tetra_point(double a01, double a02, double alpha, const EdgeTuple& e, double K) {
    check_edges(e);
    const CurvedSpace sp(K, 3);
    const double a12 = e(0, 1), a23 = e(1, 2);
    TetraPoint p;
    p.h012 = h012(a01, a02, a12, K);
    // angle A_1 A_2 A_0 fixes the side of A_2 on which the foot A_{0,12} lies
    const double c2 = cos_vertex_angle(a12, a02, a01, sp);
    if (sp.flat()) {
        p.l = a02 * c2;
        p.d = p.h012 * std::cos(alpha);
        p.h0123 = p.h012 * std::sin(alpha);
        p.x2 = std::hypot(p.d, p.l);
        p.beta = std::atan2(p.d, p.l);
    } else {
        p.l = sp.spherical() ? std::atan2(sin_k(a02, sp) * c2, cos_k(a02, sp)) / sp.kappa()
                             : atan_k(tan_k(a02, sp) * c2, sp);
        p.d = atan_k(tan_k(p.h012, sp) * std::cos(alpha), sp);
        p.h0123 = asin_k(sin_k(p.h012, sp) * std::sin(alpha), sp);
        p.x2 = avers_k(vers_k(p.d, sp) + cos_k(p.d, sp) * vers_k(p.l, sp), sp);
        p.beta = std::atan2(tan_k(p.d, sp), sin_k(p.l, sp));
    }
    const double alpha123 = angle(a12, a23, e(0, 2), sp);
    p.x1 = opposite_side(p.x2, a12, std::cos(p.beta), sp);
    p.x3 = opposite_side(p.x2, a23, std::cos(alpha123 - p.beta), sp);
    return p;
}

double a03_of(double a01, double a02, double alpha, const EdgeTuple& e, double K) {
    if (K == 0.0) return euclidean_a03_a04(a01, a02, alpha, e).a03;
    const CurvedSpace sp(K, 3);
    const TetraPoint p = tetra_point(a01, a02, alpha, e, K);
    const double alpha123 = angle(e(0, 1), e(1, 2), e(0, 2), sp);
    return cos_a0j(a02, e(1, 2), alpha123, std::cos(alpha), p, sp);
}

double a04_of(double a01, double a02, double alpha, const EdgeTuple& e, double K) {
    if (K == 0.0) return euclidean_a03_a04(a01, a02, alpha, e).a04;
    const CurvedSpace sp(K, 3);
    const TetraPoint p = tetra_point(a01, a02, alpha, e, K);
    const TetraAngles t = tetra_angles(e, K);
    return cos_a0j(a02, e(1, 3), t.alpha124, std::cos(t.alpha_g4 - alpha), p, sp);
}

double solve_alpha(double a01, double a02, double a03, const EdgeTuple& e, double K) {
    check_edges(e);
    const CurvedSpace sp(K, 3);
    const TetraPoint p = tetra_point(a01, a02, 0.0, e, K);  // h and l do not depend on alpha
    const double a23 = e(1, 2);
    const double alpha123 = angle(e(0, 1), a23, e(0, 2), sp);
    double c;
    if (sp.flat()) {
        c = (a02 * a02 + a23 * a23 - a03 * a03 - 2.0 * a23 * p.l * std::cos(alpha123)) /
            (2.0 * a23 * p.h012 * std::sin(alpha123));
    } else {
        c = (vers_k(a02, sp) + cos_k(a02, sp) * vers_k(a23, sp) - vers_k(a03, sp) -
             sin_k(a23, sp) * std::cos(alpha123) * cos_k(p.h012, sp) * sin_k(p.l, sp)) /
            (sin_k(a23, sp) * std::sin(alpha123) * sin_k(p.h012, sp));
    }
    if (!std::isfinite(c)) throw Infeasible("alpha is undetermined (A_0 on the line A_1A_2)");
    return safe_acos(c, "no real dihedral angle reproduces a03");
}

double eliminate_alpha(double a01, double a02, double a03, const EdgeTuple& e, double K) {
    return a04_of(a01, a02, solve_alpha(a01, a02, a03, e, K), e, K);
}

double dihedral_g4_flat(const EdgeTuple& e) {
    check_edges(e);
    const double a12 = e(0, 1), a23 = e(1, 2), a13 = e(0, 2);
    const double a41 = e(0, 3), a42 = e(1, 3), a43 = e(2, 3);
    const double cos123 = (a12 * a12 + a23 * a23 - a13 * a13) / (2.0 * a12 * a23);
    const double sin123 = 2.0 * heron(a12, a23, a13) / (a12 * a23);
    const double h412 = 2.0 * heron(a41, a42, a12) / a12;
    // signed foot distance from A_2 along A_2A_1
    const double l4 = (a12 * a12 + a42 * a42 - a41 * a41) / (2.0 * a12);
    const double num = (a42 * a42 + a23 * a23 - a43 * a43) / (2.0 * a23) - l4 * cos123;
    return safe_acos(num / (h412 * sin123), "dihedral angle out of range");
}

FlatA03A04 euclidean_a03_a04(double a01, double a02, double alpha, const EdgeTuple& e) {
    check_edges(e);
    const CurvedSpace sp(0.0, 3);
    const TetraPoint p = tetra_point(a01, a02, alpha, e, 0.0);
    const double a12 = e(0, 1);
    const double alpha123 = angle(a12, e(1, 2), e(0, 2), sp);
    const double alpha124 = angle(a12, e(1, 3), e(0, 3), sp);
    const double g4 = dihedral_g4_flat(e);
    return {cos_a0j(a02, e(1, 2), alpha123, std::cos(alpha), p, sp),
            cos_a0j(a02, e(1, 3), alpha124, std::cos(g4 - alpha), p, sp)};
}

double TetraConditions::max_tetraed() const {
    double m = 0.0;
    for (double x : tetraed) m = std::max(m, x);
    return m;
}

TetraConditions tetra_multitree_conditions(const FermatTree& tree, const EdgeTuple& e, const Weights& w, double K) {
    check_edges(e);
    if (!tree.floating) throw InvalidInput("tetrahedron conditions need a floating tree");
    check_weights(w, 4);
    const CurvedSpace sp(K, 3);
    TetraConditions out;
    out.first_order = first_order_residual(tree.branches, e, w, sp);
    if (K != 0.0) return out;  // the volume-ratio conditions use flat volumes

    Mat a = Mat::Zero(5, 5);
    a.bottomRightCorner(4, 4) = e.matrix();
    for (int i = 0; i < 4; ++i) a(0, i + 1) = a(i + 1, 0) = tree.branches[i];
    const EdgeTuple all(a);
    const double vol = euclidean_volume(e);
    if (!(vol > 0.0)) throw InvalidInput("degenerate tetrahedron");
    out.volumes_checked = true;
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += w[i] / tree.branches[i];
    out.C = s / vol;
    for (int i = 0; i < 4; ++i) {
        std::vector<int> idx{1, 2, 3, 4};
        idx[i] = 0;
        const double vi = euclidean_volume(all.sub(idx));
        out.sub_volumes.push_back(vi);
        if (vi <= 1e-12 * vol) {
            out.degenerate = true;
            out.tetraed.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const double r = w[i] / (tree.branches[i] * vi);
        out.tetraed.push_back(std::abs(r * r - out.C * out.C) / (out.C * out.C));
    }
    const double ell = e.ell();
    out.comparison_volume = ell * ell * ell / (6.0 * std::sqrt(2.0));
    out.volume_inequality = std::all_of(out.sub_volumes.begin(), out.sub_volumes.end(),
                                        [&](double v) { return v < out.comparison_volume; });
    return out;
}

} // namespace ffm
