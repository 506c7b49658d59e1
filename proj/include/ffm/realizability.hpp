#ifndef FFM_REALIZABILITY_HPP
#define FFM_REALIZABILITY_HPP

#include "ffm/edge_tuple.hpp"
#include "ffm/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ffm {

inline constexpr double kPsdTol = 1e-9;   // relative to the largest |eigenvalue|
inline constexpr double kRankTol = 1e-8;  // relative to the largest |eigenvalue|

struct RealizabilityReport {
    bool realizable = false;
    int rank = 0;
    double volume = 0.0;  // Euclidean tests only
    std::optional<SimplexRealization> witness;
    std::string cause;  // empty when realizable
    std::vector<double> eigenvalues;
};

// Gram form anchored at vertex 0: F_ik = (a_0i^2 + a_0k^2 - a_ik^2) / 2.
// Realizable iff F is PSD with rank r. The witness lives in R^max(r,2) and is
// also returned for PSD forms of lower rank.
RealizabilityReport schoenberg_euclidean(const EdgeTuple& t, int r);

// Cosine Gram cos(a_ik / rho) over all m points; realizable iff every edge is
// at most pi*rho, the Gram is PSD and its rank is r. The witness is placed in
// the open-hemisphere model of curvature 1/rho^2 and dimension r-1 when that
// is possible (r >= 3).
RealizabilityReport schoenberg_spherical(const EdgeTuple& t, double rho, int r);

// Hyperbolic counterpart: cosh(k a_ik) must have exactly one positive
// eigenvalue and r significant negative ones. Witness on the hyperboloid.
RealizabilityReport lorentz_realizability(const EdgeTuple& t, double K, int r);

// Non-degenerate (m-1)-simplex in the given space, with witness in its model.
// Requires m == sp.N + 1.
RealizabilityReport realize_in(const EdgeTuple& t, const CurvedSpace& sp);

// det of the bordered Cayley-Menger matrix (long double internally).
double cayley_menger_det(const EdgeTuple& t);
// (m-1)-volume of m points. Throws Infeasible when Vol^2 < -tol.
double euclidean_volume(const EdgeTuple& t);

double spherical_cm_det(const EdgeTuple& t, double K);
double hyperbolic_cm_det(const EdgeTuple& t, double K);

struct SeriesResult {
    double value = 0.0;
    double error_bound = 0.0;  // estimate of the neglected tail
    long shells = 0;           // shells summed (k = 0 .. shells-1)
    long terms = 0;
};

// Ideal regular hyperbolic simplex series with beta = (N+1)/2. Each total
// degree k is one shell. Throws NumericalFailure past max_shells.
SeriesResult milnor_ideal_regular_bound(int N, double tol, long max_shells = 1000000);
// Partial sum over shells k = 0 .. depth.
double milnor_ideal_regular_partial(int N, long depth);

// Orthoscheme series in Klein-model coordinates a_1..a_N (sum a_j^2 < 1),
// divided by k^N for curvature K < 0.
SeriesResult milnor_orthosimplex_volume(const std::vector<double>& a, double K, double tol,
                                        long max_terms = 1000000);
double milnor_orthosimplex_partial(const std::vector<double>& a, double K, long depth);

// Series inputs for the orthoscheme whose path A_{N+1} -> A_1 -> ... -> A_N
// has consecutive lengths path[0..N-1]:
//   a_1 = tanh(k path[0]),  a_j = tanh(k path[j-1]) * sqrt(1 - a_1^2 - ... - a_{j-1}^2).
std::vector<double> orthosimplex_coordinates(const std::vector<double>& path, double K);

// Excess/defect area for K != 0, Heron for K = 0.
double triangle_area_curved(double a, double b, double c, double K);

} // namespace ffm

#endif
