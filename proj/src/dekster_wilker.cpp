#include "ffm/dekster_wilker.hpp"
#include "ffm/errors.hpp"

#include <cmath>

namespace ffm {

namespace {

void check_args(double ell, int N) {
    if (!(ell > 0.0)) throw InvalidInput("ell must be positive");
    if (N < 2) throw InvalidInput("N must be >= 2");
}

// Domains are closed; allow for rounding in the comparison.
bool geq(double s, double bound) { return s >= bound * (1.0 - 1e-12); }
bool leq(double s, double bound) { return s <= bound * (1.0 + 1e-12); }

} // namespace

double lambda_euclidean(double ell, int N) {
    check_args(ell, N);
    if (N % 2 == 0) return ell * std::sqrt(1.0 - 2.0 * (N + 1) / (static_cast<double>(N) * (N + 2)));
    return ell * std::sqrt(1.0 - 2.0 / (N + 1));
}

double lambda_hyperbolic(double ell, int N, double K) {
    check_args(ell, N);
    if (!(K < 0.0)) throw InvalidInput("hyperbolic lambda needs K < 0");
    const double k = std::sqrt(-K);
    const double sh = std::sinh(0.5 * k * ell);
    if (N % 2 == 0) {
        const double x = sh * sh;
        const double f1 = 2.0 * (1.0 - 2.0 / N) * x, f2 = 2.0 * (1.0 - 2.0 / (N + 2)) * x;
        // cosh(k lambda) - 1 = (1+f1)^(1/2) (1+f2)^(1/2) - 1, kept away from cancellation
        const double c = std::sqrt((1.0 + f1) * (1.0 + f2));
        const double cm1 = (f1 + f2 + f1 * f2) / (c + 1.0);
        return 2.0 / k * std::asinh(std::sqrt(0.5 * cm1));
    }
    return 2.0 / k * std::asinh(std::sqrt(1.0 - 2.0 / (N + 1)) * sh);
}

double lambda_spherical(double ell, int N, double K) {
    check_args(ell, N);
    if (!(K > 0.0)) throw InvalidInput("spherical lambda needs K > 0");
    const double k = std::sqrt(K);
    const double sn = std::sin(0.5 * k * ell);
    if (N % 2 == 0) {
        const double x = sn * sn;
        const double f1 = 2.0 * (1.0 - 2.0 / N) * x, f2 = 2.0 * (1.0 - 2.0 / (N + 2)) * x;
        const double p = (1.0 - f1) * (1.0 - f2);
        if (p < 0.0) throw Infeasible("spherical lambda undefined for this ell");
        const double c = std::sqrt(p);
        const double omc = (f1 + f2 - f1 * f2) / (1.0 + c);  // 1 - cos(k lambda)
        return 2.0 / k * std::asin(std::sqrt(std::min(1.0, 0.5 * omc)));
    }
    return 2.0 / k * std::asin(std::sqrt(1.0 - 2.0 / (N + 1)) * sn);
}

double lambda_n(double ell, int N, double K) {
    if (K == 0.0) return lambda_euclidean(ell, N);
    return K > 0.0 ? lambda_spherical(ell, N, K) : lambda_hyperbolic(ell, N, K);
}

SphericalDomainConstants spherical_domain_constants(int N, double K) {
    if (N < 2) throw InvalidInput("N must be >= 2");
    if (!(K > 0.0)) throw InvalidInput("spherical constants need K > 0");
    const double k = std::sqrt(K);
    const double star_arg = std::sqrt((N + 1.0) / (2.0 * N));
    const double a_arg = 0.25 * std::sqrt((7.0 * N - 4.0 + std::sqrt(N * N + 8.0 * N)) / (N - 1.0));
    if (star_arg > 1.0 || a_arg > 1.0) throw InvalidInput("arcsin argument exceeds 1");
    return {2.0 / k * std::asin(star_arg), 2.0 / k * std::asin(a_arg)};
}

double m_spherical(double ell, int N, double K) {
    check_args(ell, N);
    if (!(K > 0.0)) throw InvalidInput("m_N needs K > 0");
    const double k = std::sqrt(K);
    const double c = std::cos(k * ell);
    const double ratio = (2.0 + 2.0 * (N - 1) * c) / (1.0 + (N - 2) * c);
    if (!(ratio >= 0.0)) throw Infeasible("m_N undefined for this ell");
    double arg = std::sqrt(ratio) * std::sin(0.5 * k * ell);
    if (arg > 1.0 + 1e-12 || arg < -1e-12) throw Infeasible("m_N arcsin argument out of range");
    arg = std::min(1.0, std::max(0.0, arg));
    return 2.0 / k * std::asin(arg);
}

bool in_dw(double ell, double s, int N, double K) {
    if (!(s > 0.0) || s > ell) throw InvalidInput("need 0 < s <= ell");
    if (K <= 0.0) return geq(s, lambda_n(ell, N, K));
    const auto c = spherical_domain_constants(N, K);
    if (ell > c.a_N * (1.0 + 1e-12)) return false;
    if (ell <= c.ell_star) return geq(s, lambda_spherical(ell, N, K));
    return geq(s, lambda_spherical(ell, N, K)) && leq(s, m_spherical(ell, N, K));
}

bool in_dw(const EdgeTuple& t, int N, double K) { return in_dw(t.ell(), t.s(), N, K); }

bool in_dw_euclidean(const EdgeTuple& t, int N) { return in_dw(t, N, 0.0); }

bool in_dw_hyperbolic(const EdgeTuple& t, int N, double K) {
    if (!(K < 0.0)) throw InvalidInput("hyperbolic domain needs K < 0");
    return in_dw(t, N, K);
}

bool in_dw_spherical(const EdgeTuple& t, int N, double K) {
    if (!(K > 0.0)) throw InvalidInput("spherical domain needs K > 0");
    return in_dw(t, N, K);
}

} // namespace ffm
