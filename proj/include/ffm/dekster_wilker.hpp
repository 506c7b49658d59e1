#ifndef FFM_DEKSTER_WILKER_HPP
#define FFM_DEKSTER_WILKER_HPP

#include "ffm/edge_tuple.hpp"

namespace ffm {

// Lower edge bound lambda_N(ell): every tuple with lengths in
// [lambda_N(ell), ell] realizes a simplex for every edge assignment.
double lambda_euclidean(double ell, int N);
double lambda_hyperbolic(double ell, int N, double K);
double lambda_spherical(double ell, int N, double K);

bool in_dw_euclidean(const EdgeTuple& t, int N);
bool in_dw_hyperbolic(const EdgeTuple& t, int N, double K);
bool in_dw_spherical(const EdgeTuple& t, int N, double K);

// Dispatch on the sign of K.
double lambda_n(double ell, int N, double K);
bool in_dw(const EdgeTuple& t, int N, double K);
bool in_dw(double ell, double s, int N, double K);

struct SphericalDomainConstants {
    double ell_star;
    double a_N;
};
SphericalDomainConstants spherical_domain_constants(int N, double K);

// Upper arc of the spherical domain for ell in [ell_star, a_N].
double m_spherical(double ell, int N, double K);

} // namespace ffm

#endif
