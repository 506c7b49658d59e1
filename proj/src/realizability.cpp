#include "ffm/realizability.hpp"
#include "ffm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ffm {

namespace {

struct Spectrum {
    Vec values;  // descending
    Mat vectors;
};

Spectrum spectrum(const Mat& g) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    const int n = static_cast<int>(g.rows());
    Spectrum s{Vec(n), Mat(n, n)};
    for (int i = 0; i < n; ++i) {
        s.values[i] = es.eigenvalues()[n - 1 - i];
        s.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return s;
}

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

// Unit direction c with c.x_i > 0 for every row x_i, if one is found.
std::optional<Vec> hemisphere_direction(const Mat& x) {
    Vec c = x.colwise().sum().transpose();
    if (c.norm() == 0.0) c = x.row(0).transpose();
    c.normalize();
    for (int it = 0; it < 2000; ++it) {
        Eigen::Index worst;
        const double margin = (x * c).minCoeff(&worst) / x.row(worst).norm();
        if (margin > 1e-9) return c;
        c += 0.25 * x.row(worst).transpose() / x.row(worst).norm();
        c.normalize();
    }
    return std::nullopt;
}

// Householder reflection mapping unit c to e_0.
Mat reflect_to_e0(const Vec& c) {
    const int n = static_cast<int>(c.size());
    Vec v = c;
    v[0] -= 1.0;
    const double nv = v.squaredNorm();
    if (nv < 1e-30) return Mat::Identity(n, n);
    return Mat::Identity(n, n) - 2.0 * v * v.transpose() / nv;
}

} // namespace

RealizabilityReport schoenberg_euclidean(const EdgeTuple& t, int r) {
    const int m = t.m();
    if (r < 1 || r > m - 1) throw InvalidInput("target rank must be in [1, m-1]");
    const Mat sq = t.matrix().cwiseAbs2();
    const Vec c = sq.row(0).tail(m - 1).transpose();
    const Mat f = 0.5 * (c.rowwise().replicate(m - 1) + c.transpose().colwise().replicate(m - 1) -
                         sq.bottomRightCorner(m - 1, m - 1));
    const Spectrum sp = spectrum(f);
    RealizabilityReport rep;
    rep.eigenvalues = to_std(sp.values);
    const double top = max_abs(sp.values);
    const bool psd = sp.values[m - 2] >= -kPsdTol * top;
    rep.rank = static_cast<int>((sp.values.array() > kRankTol * top).count());
    if (!psd) {
        rep.cause = "Gram form is not positive semidefinite";
        return rep;
    }
    rep.volume = euclidean_volume(t);
    rep.realizable = rep.rank == r;
    if (!rep.realizable) rep.cause = "rank " + std::to_string(rep.rank) + " differs from target " + std::to_string(r);
    if (rep.rank <= r) {
        const int dim = std::max(r, 2);
        SimplexRealization w{CurvedSpace(0.0, dim), {}};
        w.vertices.push_back(Vec::Zero(dim));
        for (int i = 0; i < m - 1; ++i) {
            Vec x = Vec::Zero(dim);
            for (int c = 0; c < r; ++c) x[c] = sp.vectors(i, c) * std::sqrt(std::max(0.0, sp.values[c]));
            w.vertices.push_back(x);
        }
        rep.witness = std::move(w);
    }
    return rep;
}

RealizabilityReport schoenberg_spherical(const EdgeTuple& t, double rho, int r) {
    if (!(rho > 0.0)) throw InvalidInput("radius must be positive");
    const int m = t.m();
    if (r < 1 || r > m) throw InvalidInput("target rank must be in [1, m]");
    RealizabilityReport rep;
    if (t.ell() > std::numbers::pi * rho * (1.0 + 1e-12)) {
        rep.cause = "edge exceeds pi*rho";
        return rep;
    }
    Mat g(m, m);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) g(i, k) = std::cos(t(i, k) / rho);
    const Spectrum sp = spectrum(g);
    rep.eigenvalues = to_std(sp.values);
    const double top = max_abs(sp.values);
    rep.rank = static_cast<int>((sp.values.array() > kRankTol * top).count());
    if (sp.values[m - 1] < -kPsdTol * top) {
        rep.cause = "cosine Gram form is not positive semidefinite";
        return rep;
    }
    rep.realizable = rep.rank == r;
    if (!rep.realizable) {
        rep.cause = "rank " + std::to_string(rep.rank) + " differs from target " + std::to_string(r);
        return rep;
    }
    if (r < 3) return rep;  // no model of dimension >= 2 to place it in
    Mat x(m, r);
    for (int i = 0; i < m; ++i)
        for (int c = 0; c < r; ++c) x(i, c) = sp.vectors(i, c) * std::sqrt(std::max(0.0, sp.values[c]));
    const auto dir = hemisphere_direction(x);
    if (!dir) {
        rep.cause = "no open hemisphere contains the configuration";
        return rep;
    }
    const Mat h = reflect_to_e0(*dir);
    SimplexRealization w{CurvedSpace(1.0 / (rho * rho), r - 1), {}};
    for (int i = 0; i < m; ++i) {
        Vec p = h * x.row(i).transpose();
        p *= rho / p.norm();
        w.vertices.push_back(p);
    }
    rep.witness = std::move(w);
    return rep;
}

RealizabilityReport lorentz_realizability(const EdgeTuple& t, double K, int r) {
    if (!(K < 0.0)) throw InvalidInput("curvature must be negative");
    const int m = t.m();
    if (r < 1 || r > m - 1) throw InvalidInput("target rank must be in [1, m-1]");
    const double k = std::sqrt(-K);
    Mat c(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = std::cosh(k * t(i, j));
    const Spectrum sp = spectrum(c);
    RealizabilityReport rep;
    rep.eigenvalues = to_std(sp.values);
    const double top = max_abs(sp.values);
    const int positive = static_cast<int>((sp.values.array() > kPsdTol * top).count());
    rep.rank = static_cast<int>((sp.values.array() < -kRankTol * top).count());
    if (positive != 1) {
        rep.cause = "cosh matrix must have exactly one positive eigenvalue";
        return rep;
    }
    rep.realizable = rep.rank == r;
    if (!rep.realizable) rep.cause = "rank " + std::to_string(rep.rank) + " differs from target " + std::to_string(r);
    if (rep.rank > r) return rep;
    const int dim = std::max(r, 2);
    SimplexRealization w{CurvedSpace(K, dim), {}};
    double sign = sp.vectors(0, 0) < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < m; ++i) {
        Vec p = Vec::Zero(dim + 1);
        p[0] = sign * sp.vectors(i, 0) * std::sqrt(sp.values[0]);
        for (int c2 = 0; c2 < rep.rank; ++c2) {
            const int col = m - 1 - c2;  // most negative eigenvalues first
            p[1 + c2] = sp.vectors(i, col) * std::sqrt(-sp.values[col]);
        }
        p /= k;
        p[0] = std::sqrt(1.0 / (k * k) + p.tail(dim).squaredNorm());
        w.vertices.push_back(p);
    }
    rep.witness = std::move(w);
    return rep;
}

RealizabilityReport realize_in(const EdgeTuple& t, const CurvedSpace& sp) {
    if (t.m() != sp.N + 1) throw InvalidInput("realize_in expects N+1 points");
    RealizabilityReport rep;
    if (sp.flat()) {
        rep = schoenberg_euclidean(t, sp.N);
    } else if (sp.spherical()) {
        rep = schoenberg_spherical(t, 1.0 / sp.kappa(), sp.N + 1);
        if (rep.realizable && !rep.witness) rep.realizable = false;
    } else {
        rep = lorentz_realizability(t, sp.K, sp.N);
    }
    if (rep.realizable && rep.witness) rep.witness->space = sp;
    return rep;
}

double cayley_menger_det(const EdgeTuple& t) {
    const int m = t.m();
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    MatL b = MatL::Zero(m + 1, m + 1);
    for (int i = 1; i <= m; ++i) b(0, i) = b(i, 0) = 1.0L;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const long double d = t(i, j);
            b(i + 1, j + 1) = d * d;
        }
    return static_cast<double>(b.partialPivLu().determinant());
}

double euclidean_volume(const EdgeTuple& t) {
    const int m = t.m();
    long double denom = (m % 2 == 0) ? 1.0L : -1.0L;
    denom *= std::pow(2.0L, m - 1);
    long double f = 1.0L;
    for (int i = 2; i <= m - 1; ++i) f *= i;
    denom *= f * f;
    const long double v2 = static_cast<long double>(cayley_menger_det(t)) / denom;
    // Vol^2 carries units length^(2(m-1)); compare against that scale
    const long double scale = std::pow(static_cast<long double>(t.ell()), 2 * (m - 1)) / (f * f);
    if (v2 < -1e-10L * scale) throw Infeasible("negative squared volume: tuple is not Euclidean-realizable");
    return static_cast<double>(std::sqrt(std::max(0.0L, v2)));
}

double spherical_cm_det(const EdgeTuple& t, double K) {
    if (!(K > 0.0)) throw InvalidInput("spherical determinant needs K > 0");
    const double k = std::sqrt(K);
    Mat c(t.m(), t.m());
    for (int i = 0; i < t.m(); ++i)
        for (int j = 0; j < t.m(); ++j) c(i, j) = std::cos(k * t(i, j));
    return c.partialPivLu().determinant();
}

double hyperbolic_cm_det(const EdgeTuple& t, double K) {
    if (!(K < 0.0)) throw InvalidInput("hyperbolic determinant needs K < 0");
    const double k = std::sqrt(-K);
    Mat c(t.m(), t.m());
    for (int i = 0; i < t.m(); ++i)
        for (int j = 0; j < t.m(); ++j) c(i, j) = std::cosh(k * t(i, j));
    return c.partialPivLu().determinant();
}

namespace {

// Shell terms t_k of the ideal regular series. With p_n[k] the n-fold
// convolution of (1/2)_i and s_n[k] = p_n[k] / (1/2)_k:
//   s_n[k] = s_{n-1}[k] + (k-1+n/2) / (n (k-1/2)) * s_n[k-1]
// and A_{N,k} = 4^k p_{N+1}[k], so t_k = sqrt(N) g_k s_{N+1}[k] with
//   g_k = (beta)_k 4^k (1/2)_k / (N+2k)!.
class IdealRegularTerms {
public:
    explicit IdealRegularTerms(int n) : n_(n), beta_(0.5 * (n + 1)), s_(n + 2, 0.0) {
        s_[0] = 1.0;
        for (int j = 1; j <= n + 1; ++j) s_[j] = 1.0;  // s_n[0] = 1
        g_ = 1.0 / std::tgamma(n + 1.0);
    }
    double next() {
        if (k_ > 0) {
            const double k = static_cast<double>(k_);
            s_[0] = 0.0;
            for (int j = 1; j <= n_ + 1; ++j) s_[j] = s_[j - 1] + (k - 1.0 + 0.5 * j) / (j * (k - 0.5)) * s_[j];
            g_ *= (beta_ + k - 1.0) * 2.0 * (2.0 * k - 1.0) / ((n_ + 2.0 * k) * (n_ + 2.0 * k - 1.0));
        }
        ++k_;
        return std::sqrt(static_cast<double>(n_)) * g_ * s_[n_ + 1];
    }

private:
    int n_;
    double beta_;
    std::vector<double> s_;
    double g_;
    long k_ = 0;
};

} // namespace

SeriesResult milnor_ideal_regular_bound(int N, double tol, long max_shells) {
    if (N < 2) throw InvalidInput("N must be >= 2");
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    IdealRegularTerms terms(N);
    SeriesResult res;
    long double sum = 0.0L;
    double last = 0.0;
    for (long k = 0; k < max_shells; ++k) {
        last = terms.next();
        sum += last;
        res.shells = k + 1;
        if (res.shells >= 3 && last < tol) {
            res.value = static_cast<double>(sum);
            res.terms = res.shells;
            // terms decay like k^{-(N+1)/2}
            const double p = 0.5 * (N + 1);
            res.error_bound = last * static_cast<double>(k) / (p - 1.0);
            return res;
        }
    }
    throw NumericalFailure("ideal regular series did not reach the tolerance within the shell cap");
}

double milnor_ideal_regular_partial(int N, long depth) {
    if (N < 2) throw InvalidInput("N must be >= 2");
    IdealRegularTerms terms(N);
    long double sum = 0.0L;
    for (long k = 0; k <= depth; ++k) sum += terms.next();
    return static_cast<double>(sum);
}

namespace {

void check_ortho_args(const std::vector<double>& a, double K) {
    if (a.empty()) throw InvalidInput("orthosimplex series needs at least one coordinate");
    if (!(K < 0.0)) throw InvalidInput("orthosimplex series is hyperbolic: K must be negative");
    double r2 = 0.0;
    for (double x : a) {
        if (!(x >= 0.0)) throw InvalidInput("orthosimplex coordinates must be nonnegative");
        r2 += x * x;
    }
    if (!(r2 < 1.0)) throw InvalidInput("orthosimplex coordinates outside the convergence region");
}

// Sum of all terms with i_1 + ... + i_N = k (without the prod a_j prefactor).
long double ortho_shell(const std::vector<double>& a, long k, long& count) {
    const int n = static_cast<int>(a.size());
    const double beta = 0.5 * (n + 1);
    std::vector<long> idx(n, 0);
    long double shell = 0.0L;
    auto term = [&]() {
        double lt = std::lgamma(beta + k) - std::lgamma(beta);
        long tail = 0;
        for (int j = n - 1; j >= 0; --j) {
            tail += idx[j];
            if (idx[j] > 0) lt += 2.0 * idx[j] * std::log(a[j]);
            lt -= std::lgamma(idx[j] + 1.0);
            lt -= std::log(2.0 * tail + (n - j));
        }
        ++count;
        return std::exp(static_cast<long double>(lt));
    };
    auto fill = [&](auto&& self, int j, long left) -> void {
        if (j == n - 1) {
            idx[j] = left;
            if (left > 0 && a[j] == 0.0) return;
            shell += term();
            return;
        }
        for (long i = 0; i <= left; ++i) {
            if (i > 0 && a[j] == 0.0) break;
            idx[j] = i;
            self(self, j + 1, left - i);
        }
    };
    fill(fill, 0, k);
    return shell;
}

} // namespace

SeriesResult milnor_orthosimplex_volume(const std::vector<double>& a, double K, double tol, long max_terms) {
    check_ortho_args(a, K);
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
    const int n = static_cast<int>(a.size());
    long double pref = 1.0L;
    for (double x : a) pref *= x;
    pref /= std::pow(static_cast<long double>(std::sqrt(-K)), n);
    SeriesResult res;
    if (pref == 0.0L) {
        res.shells = 1;
        return res;
    }
    long double sum = 0.0L, prev = 0.0L;
    for (long k = 0;; ++k) {
        const long double shell = pref * ortho_shell(a, k, res.terms);
        sum += shell;
        res.shells = k + 1;
        if (res.shells >= 3 && shell < tol) {
            const long double ratio = prev > 0.0L ? std::min(0.999L, shell / prev) : 0.5L;
            res.error_bound = static_cast<double>(shell * ratio / (1.0L - ratio));
            break;
        }
        prev = shell;
        if (res.terms > max_terms) throw NumericalFailure("orthosimplex series exceeded the term cap");
    }
    res.value = static_cast<double>(sum);
    return res;
}

double milnor_orthosimplex_partial(const std::vector<double>& a, double K, long depth) {
    check_ortho_args(a, K);
    long double pref = 1.0L;
    for (double x : a) pref *= x;
    pref /= std::pow(static_cast<long double>(std::sqrt(-K)), static_cast<int>(a.size()));
    if (pref == 0.0L) return 0.0;
    long double sum = 0.0L;
    long count = 0;
    for (long k = 0; k <= depth; ++k) sum += pref * ortho_shell(a, k, count);
    return static_cast<double>(sum);
}

std::vector<double> orthosimplex_coordinates(const std::vector<double>& path, double K) {
    if (!(K < 0.0)) throw InvalidInput("orthosimplex coordinates need K < 0");
    const double k = std::sqrt(-K);
    std::vector<double> a;
    double used = 0.0;
    for (double e : path) {
        if (!(e >= 0.0)) throw InvalidInput("orthosimplex path lengths must be nonnegative");
        const double x = std::tanh(k * e) * std::sqrt(std::max(0.0, 1.0 - used));
        a.push_back(x);
        used += x * x;
    }
    return a;
}

double triangle_area_curved(double a, double b, double c, double K) {
    if (K == 0.0) return euclidean_volume(EdgeTuple::from_upper({a, b, c}, 3));
    const CurvedSpace sp(K, 2);
    const double ga = std::acos(cos_vertex_angle(b, c, a, sp));
    const double gb = std::acos(cos_vertex_angle(a, c, b, sp));
    const double gc = std::acos(cos_vertex_angle(a, b, c, sp));
    const double sum = ga + gb + gc;
    return K > 0.0 ? (sum - std::numbers::pi) / K : (std::numbers::pi - sum) / -K;
}

} // namespace ffm
