#include "ffm/geometry.hpp"
#include "ffm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ffm {

CurvedSpace::CurvedSpace(double curvature, int dim) : K(curvature), N(dim) {
    if (dim < 2) throw InvalidInput("dimension N must be >= 2");
    if (!std::isfinite(curvature)) throw InvalidInput("curvature must be finite");
}

double CurvedSpace::kappa() const { return std::sqrt(std::abs(K)); }

double model_inner(const Vec& x, const Vec& y, const CurvedSpace& sp) {
    double s = x.dot(y);
    if (sp.hyperbolic()) s -= 2.0 * x[0] * y[0];
    return s;
}

double cos_k(double x, const CurvedSpace& sp) {
    const double t = sp.kappa() * x;
    if (sp.spherical()) return std::cos(t);
    if (sp.hyperbolic()) return std::cosh(t);
    return 1.0;
}

double sin_k(double x, const CurvedSpace& sp) {
    const double t = sp.kappa() * x;
    if (sp.spherical()) return std::sin(t);
    if (sp.hyperbolic()) return std::sinh(t);
    return 0.0;
}

bool is_model_point(const Vec& p, const CurvedSpace& sp, double tol) {
    if (p.size() != sp.ambient_dim()) return false;
    if (!p.allFinite()) return false;
    if (sp.flat()) return true;
    const double q = sp.K * model_inner(p, p, sp);
    if (std::abs(q - 1.0) > tol) return false;
    // open hemisphere / upper sheet
    return sp.kappa() * p[0] > 1e-12;
}

void check_point(const Vec& p, const CurvedSpace& sp, double tol) {
    if (p.size() != sp.ambient_dim())
        throw InvalidInput("point has wrong ambient dimension");
    if (!is_model_point(p, sp, tol)) {
        if (sp.spherical() && std::abs(sp.K * p.squaredNorm() - 1.0) <= tol)
            throw Infeasible("point outside the open hemisphere");
        throw InvalidInput("point violates the model invariants");
    }
}

Vec base_point(const CurvedSpace& sp) {
    Vec p = Vec::Zero(sp.ambient_dim());
    if (!sp.flat()) p[0] = 1.0 / sp.kappa();
    return p;
}

Vec project_to_model(const Vec& x, const CurvedSpace& sp) {
    if (x.size() != sp.ambient_dim()) throw InvalidInput("wrong ambient dimension");
    if (sp.flat()) return x;
    const double k = sp.kappa();
    if (sp.spherical()) {
        const double n = x.norm();
        if (n == 0.0 || x[0] <= 0.0) throw Infeasible("cannot project into the open hemisphere");
        return x / (n * k);
    }
    const double l = model_inner(x, x, sp);
    if (l < 0.0 && x[0] > 0.0) return x / (std::sqrt(-l) * k);
    // keep the spatial part and lift onto the upper sheet
    Vec y = x;
    y[0] = std::sqrt(1.0 / (k * k) + x.tail(x.size() - 1).squaredNorm());
    return y;
}

double geodesic_distance(const Vec& p, const Vec& q, const CurvedSpace& sp) {
    check_point(p, sp, 1e-8);
    check_point(q, sp, 1e-8);
    if (sp.flat()) return (p - q).norm();
    const double k = sp.kappa();
    if (sp.spherical()) {
        const Vec u = k * p, v = k * q;
        return 2.0 / k * std::atan2((u - v).norm(), (u + v).norm());
    }
    const Vec w = k * (p - q);
    const double l = std::max(0.0, model_inner(w, w, sp));
    return 2.0 / k * std::asinh(0.5 * std::sqrt(l));
}

double cos_vertex_angle(double a, double b, double c, const CurvedSpace& sp) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("degenerate side in cos_vertex_angle");
    if (!(c >= 0.0)) throw InvalidInput("negative side in cos_vertex_angle");
    // 1 - 2 (hav(c) - hav(a-b)) / (S(a) S(b)): no cancellation for thin triangles
    double r;
    const double k = sp.kappa();
    if (sp.flat()) {
        r = 1.0 - (c * c - (a - b) * (a - b)) / (2.0 * a * b);
    } else if (sp.spherical()) {
        const double sc = std::sin(0.5 * k * c), sd = std::sin(0.5 * k * (a - b));
        r = 1.0 - 2.0 * (sc * sc - sd * sd) / (std::sin(k * a) * std::sin(k * b));
    } else {
        const double sc = std::sinh(0.5 * k * c), sd = std::sinh(0.5 * k * (a - b));
        r = 1.0 - 2.0 * (sc * sc - sd * sd) / (std::sinh(k * a) * std::sinh(k * b));
    }
    if (!std::isfinite(r)) throw Infeasible("cosine law evaluated to a non-finite value");
    if (r > 1.0 + 1e-9 || r < -1.0 - 1e-9) throw Infeasible("side lengths violate the triangle inequality");
    return std::clamp(r, -1.0, 1.0);
}

double opposite_side(double a, double b, double cos_gamma, const CurvedSpace& sp) {
    cos_gamma = std::clamp(cos_gamma, -1.0, 1.0);
    const double k = sp.kappa();
    if (sp.flat()) {
        // c^2 = (a-b)^2 + 2ab(1 - cos)
        return std::sqrt(std::max(0.0, (a - b) * (a - b) + 2.0 * a * b * (1.0 - cos_gamma)));
    }
    if (sp.spherical()) {
        const double sd = std::sin(0.5 * k * (a - b));
        const double h = sd * sd + 0.5 * std::sin(k * a) * std::sin(k * b) * (1.0 - cos_gamma);
        return 2.0 / k * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
    }
    const double sd = std::sinh(0.5 * k * (a - b));
    const double h = sd * sd + 0.5 * std::sinh(k * a) * std::sinh(k * b) * (1.0 - cos_gamma);
    return 2.0 / k * std::asinh(std::sqrt(std::max(0.0, h)));
}

double tangent_norm(const Vec& v, const CurvedSpace& sp) {
    return std::sqrt(std::max(0.0, model_inner(v, v, sp)));
}

Vec log_map(const Vec& p, const Vec& q, const CurvedSpace& sp) {
    if (sp.flat()) return q - p;
    const double d = geodesic_distance(p, q, sp);
    if (d == 0.0) return Vec::Zero(p.size());
    const double k = sp.kappa();
    const Vec u = k * p;
    const Vec w = k * (q - p);
    // component of q - p orthogonal to p; written through q - p for accuracy at short range
    Vec t = sp.spherical() ? Vec(w - u.dot(w) * u) : Vec(w + model_inner(u, w, sp) * u);
    const double n = tangent_norm(t, sp);
    if (n == 0.0) return Vec::Zero(p.size());
    return (d / n) * t;
}

Vec exp_map(const Vec& p, const Vec& v, const CurvedSpace& sp) {
    if (sp.flat()) return p + v;
    const double n = tangent_norm(v, sp);
    if (n == 0.0) return p;
    const double k = sp.kappa();
    Vec q;
    if (sp.spherical()) {
        q = std::cos(k * n) * p + (std::sin(k * n) / (k * n)) * v;
        q /= q.norm() * k;
        if (q[0] <= 0.0) throw Infeasible("exp_map left the open hemisphere");
    } else {
        q = std::cosh(k * n) * p + (std::sinh(k * n) / (k * n)) * v;
        q[0] = std::sqrt(1.0 / (k * k) + q.tail(q.size() - 1).squaredNorm());
    }
    return q;
}

Mat tangent_basis(const Vec& p, const CurvedSpace& sp) {
    const int n = sp.N;
    if (sp.flat()) return Mat::Identity(n, n);
    const int dim = sp.ambient_dim();
    const double pp = model_inner(p, p, sp);
    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    // least aligned coordinate axes first; the most aligned one is the one dropped
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(p[a]) < std::abs(p[b]); });
    Mat basis(dim, n);
    int found = 0;
    for (int idx : order) {
        if (found == n) break;
        Vec v = Vec::Zero(dim);
        v[idx] = 1.0;
        v -= (model_inner(v, p, sp) / pp) * p;
        for (int j = 0; j < found; ++j) v -= model_inner(v, basis.col(j), sp) * basis.col(j);
        const double nv = tangent_norm(v, sp);
        if (nv < 1e-8) continue;
        basis.col(found++) = v / nv;
    }
    if (found != n) throw NumericalFailure("could not build a tangent basis");
    return basis;
}

double angle_at(const Vec& p, const Vec& q, const Vec& r, const CurvedSpace& sp) {
    const Vec u = log_map(p, q, sp), v = log_map(p, r, sp);
    const double nu = tangent_norm(u, sp), nv = tangent_norm(v, sp);
    if (nu == 0.0 || nv == 0.0) throw InvalidInput("angle_at: coincident points");
    return std::acos(std::clamp(model_inner(u, v, sp) / (nu * nv), -1.0, 1.0));
}

Mat SimplexRealization::distances() const {
    const int m = size();
    Mat d = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) d(i, j) = d(j, i) = geodesic_distance(vertices[i], vertices[j], space);
    return d;
}

} // namespace ffm
