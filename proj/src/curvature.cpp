#include "ffm/curvature.hpp"
#include "ffm/errors.hpp"
#include "ffm/immersion.hpp"
#include "ffm/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ffm {

double normalized_curved_det(const EdgeTuple& t, double K) {
    if (K == 0.0) throw InvalidInput("curvature must be nonzero");
    const int m = t.m();
    const double det = K > 0.0 ? spherical_cm_det(t, K) : hyperbolic_cm_det(t, K);
    return det / std::pow(std::abs(K), m - 1);
}

double CurvatureEstimate::radius() const {
    return K ? 1.0 / std::sqrt(std::abs(*K)) : std::numeric_limits<double>::infinity();
}

namespace {

// Nonnegative exactly where the tuple is realizable at K, up to rounding: the
// smallest eigenvalue of the cos matrix (K > 0) or minus the second largest of
// the cosh matrix (K < 0), scaled by the largest eigenvalue magnitude.
double critical_eigenvalue(const EdgeTuple& t, double K) {
    const int m = t.m();
    const double k = std::sqrt(std::abs(K));
    Mat c(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = K > 0.0 ? std::cos(k * t(i, j)) : std::cosh(k * t(i, j));
    const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(c, Eigen::EigenvaluesOnly).eigenvalues();  // ascending
    const double scale = std::max({1.0, std::abs(ev[0]), std::abs(ev[m - 1])});
    return (K > 0.0 ? ev[0] : -ev[m - 2]) / scale;
}

template <class F>
double bisect(F f, double lo, double hi, double flo, double tol) {
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section maximum of a unimodal f on [lo, hi]; returns the argmax.
template <class F>
double golden_max(F f, double lo, double hi, double tol) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol * hi) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::abs(b); }),
            v.end());
}

CurvatureEstimate scan(const EdgeTuple& t, CurvatureSign sign, double k_lo, double k_hi, double tol,
                       int grid_points) {
    if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw InvalidInput("curvature bracket must satisfy 0 < k_lo < k_hi");
    if (grid_points < 3) throw InvalidInput("grid needs at least three points");
    const double s = sign == CurvatureSign::positive ? 1.0 : -1.0;
    auto f = [&](double k) { return normalized_curved_det(t, s * k); };
    auto h = [&](double k) { return critical_eigenvalue(t, s * k); };
    // eigenvalues below this are rounding noise of an O(m) matrix
    const double noise = 1e-12 * t.m();

    CurvatureEstimate out;
    const double ell = t.ell();
    out.flat_consistent = std::abs(cayley_menger_det(t)) <= 1e-9 * std::pow(ell, 2.0 * (t.m() - 1));

    const double span = std::log(k_hi / k_lo);
    std::vector<double> k(grid_points), fk(grid_points), hk(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        k[i] = i + 1 == grid_points ? k_hi : k_lo * std::exp(span * i / (grid_points - 1));
        fk[i] = f(k[i]);
        hk[i] = h(k[i]);
    }
    for (int i = 1; i < grid_points; ++i) {
        if (fk[i - 1] == 0.0) out.roots.push_back(s * k[i - 1]);
        else if ((fk[i - 1] < 0.0) != (fk[i] < 0.0) && fk[i] != 0.0)
            out.roots.push_back(s * bisect(f, k[i - 1], k[i], fk[i - 1], tol));
        if (std::abs(hk[i - 1]) > noise && std::abs(hk[i]) > noise && (hk[i - 1] < 0.0) != (hk[i] < 0.0))
            out.admissible.push_back(s * bisect(h, k[i - 1], k[i], hk[i - 1], tol));
    }
    if (fk.back() == 0.0) out.roots.push_back(s * k.back());
    // a pair of roots inside one cell: the grid only sees a negative bump
    for (int i = 1; i + 1 < grid_points; ++i) {
        if (!(hk[i] < -noise && hk[i] >= hk[i - 1] && hk[i] >= hk[i + 1])) continue;
        const double x = golden_max(h, k[i - 1], k[i + 1], 1e-12);
        const double hx = h(x);
        if (hx > noise) {
            out.admissible.push_back(s * bisect(h, k[i - 1], x, hk[i - 1], tol));
            out.admissible.push_back(s * bisect(h, x, k[i + 1], hx, tol));
        } else if (hx >= -noise) {
            out.admissible.push_back(s * x);
        }
    }
    // spherical edges longer than pi / kappa wrap around
    if (s > 0.0) {
        const double amax = t.matrix().maxCoeff();
        std::erase_if(out.admissible, [&](double K) { return std::sqrt(K) * amax > std::numbers::pi; });
    }
    sort_unique(out.admissible);
    // every admissible root is a determinant root, even when a nearby zero
    // cancels the sign change of the determinant on the grid
    for (double r : out.admissible) {
        const bool known = std::any_of(out.roots.begin(), out.roots.end(),
                                       [&](double x) { return std::abs(x - r) <= 1e-8 * std::abs(r); });
        if (!known) out.roots.push_back(r);
    }
    sort_unique(out.roots);
    return out;
}

[[noreturn]] void no_root(const CurvatureEstimate& e) {
    throw NumericalFailure(e.roots.empty() ? "no sign change of the curved determinant in the bracket"
                                           : "determinant roots in the bracket, none with a realizable signature");
}

} // namespace

CurvatureEstimate estimate_curvature(const EdgeTuple& t, CurvatureSign sign, double k_lo, double k_hi, double tol,
                                     int grid_points) {
    CurvatureEstimate out = scan(t, sign, k_lo, k_hi, tol, grid_points);
    if (!out.admissible.empty()) out.K = out.admissible.front();
    else if (!out.flat_consistent) no_root(out);
    return out;
}

double tree_stationarity(const CombinedTuple& ct, double K) {
    const int m = ct.points() - 1;
    if (static_cast<int>(ct.weights.size()) < m) throw InvalidInput("combined tuple lacks branch weights");
    const CurvedSpace sp(K, std::max(1, m - 1));
    Mat c = Mat::Identity(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            c(i, j) = c(j, i) = cos_vertex_angle(ct.edges(0, i + 1), ct.edges(0, j + 1), ct.edges(i + 1, j + 1), sp);
    // component of sum B_i u_i along each u_j
    const Vec b = Eigen::Map<const Vec>(ct.weights.data(), m);
    return (c * b).cwiseAbs().maxCoeff() / b.sum();
}

CurvatureEstimate estimate_curvature(const CombinedTuple& ct, CurvatureSign sign, double k_lo, double k_hi,
                                     double tol, int grid_points) {
    CurvatureEstimate out = scan(ct.edges, sign, k_lo, k_hi, tol, grid_points);
    for (double K : out.admissible)
        if (tree_stationarity(ct, K) <= 1e-7) out.stationary.push_back(K);
    if (!out.stationary.empty()) out.K = out.stationary.front();
    else if (!out.admissible.empty()) throw NumericalFailure("no realizable root keeps the tree point stationary");
    else if (!out.flat_consistent) no_root(out);
    return out;
}

namespace {

template <class T>
CurvatureConsensus consensus(const std::vector<T>& tuples, CurvatureSign sign, double k_lo, double k_hi,
                             double spread_tol) {
    if (tuples.empty()) throw InvalidInput("consensus needs at least one tuple");
    CurvatureConsensus out;
    for (const auto& t : tuples) {
        const CurvatureEstimate e = estimate_curvature(t, sign, k_lo, k_hi);
        if (!e.K) throw NumericalFailure("flat-consistent data carry no curvature");
        out.estimates.push_back(*e.K);
    }
    std::vector<double> v = out.estimates;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out.K = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    out.spread = v.back() - v.front();
    out.same_sphere = out.spread <= spread_tol * std::abs(out.K);
    return out;
}

} // namespace

CurvatureConsensus curvature_consensus(const std::vector<EdgeTuple>& tuples, CurvatureSign sign, double k_lo,
                                       double k_hi, double spread_tol) {
    return consensus(tuples, sign, k_lo, k_hi, spread_tol);
}

CurvatureConsensus curvature_consensus(const std::vector<CombinedTuple>& tuples, CurvatureSign sign, double k_lo,
                                       double k_hi, double spread_tol) {
    return consensus(tuples, sign, k_lo, k_hi, spread_tol);
}

CurvatureConsensus multitree_curvature_consensus(const MultitreeSolution& ms, CurvatureSign sign, double k_lo,
                                                 double k_hi, double spread_tol) {
    std::vector<CombinedTuple> tuples;
    for (const auto& e : ms.entries) {
        if (!e.tree.floating) continue;
        tuples.push_back(CombinedTuple::from_tree(e.tree, e.assignment.edges, ms.weights));
    }
    return curvature_consensus(tuples, sign, k_lo, k_hi, spread_tol);
}

} // namespace ffm
