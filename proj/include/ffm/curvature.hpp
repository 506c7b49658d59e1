#ifndef FFM_CURVATURE_HPP
#define FFM_CURVATURE_HPP

#include "ffm/edge_tuple.hpp"
#include "ffm/fermat.hpp"
#include "ffm/immersion.hpp"

#include <optional>
#include <vector>

namespace ffm {

enum class CurvatureSign { positive, negative };

// det of the cos (K > 0) or cosh (K < 0) matrix of kappa * a_ij, divided by
// |K|^(m-1) so that it stays finite as K -> 0.
double normalized_curved_det(const EdgeTuple& t, double K);

struct CurvatureEstimate {
    std::optional<double> K;         // primary root, see estimate_curvature
    std::vector<double> roots;       // every bracketed determinant root, by increasing |K|
    std::vector<double> admissible;  // roots at which the tuple is realizable in the model
    std::vector<double> stationary;  // admissible roots keeping the tree point stationary
    bool flat_consistent = false;  // the flat Cayley-Menger determinant vanishes too
    double radius() const;      // 1/sqrt|K|, infinity when K is empty
};

// The tuple holds N + 2 points measured in an N-dimensional space of unknown
// curvature. [k_lo, k_hi] are magnitudes, 0 < k_lo < k_hi. A determinant root
// is admissible when the cos matrix is PSD there and no edge exceeds pi/kappa
// (K > 0), or the cosh matrix keeps a single positive eigenvalue (K < 0).
// Pairs of admissible roots closer than one grid cell are found by maximizing
// the critical eigenvalue inside the cell. The primary root is the
// smallest-|K| admissible one. Throws NumericalFailure when no admissible
// root is bracketed and the data are not flat.
//
// Edge data alone may be realizable at two curvatures: the ends of an interval
// on which the points span one more dimension. The CombinedTuple overload
// breaks the tie with the weights: the primary root is the smallest-|K|
// admissible root at which the tree point satisfies sum B_i u_i = 0.
CurvatureEstimate estimate_curvature(const EdgeTuple& t, CurvatureSign sign, double k_lo, double k_hi,
                                     double tol = 1e-13, int grid_points = 400);
CurvatureEstimate estimate_curvature(const CombinedTuple& ct, CurvatureSign sign, double k_lo, double k_hi,
                                     double tol = 1e-13, int grid_points = 400);

// max_j |<sum B_i u_i, u_j>| / sum B_i at the tree point (index 0), the
// angles between the unit tangents taken from the cosine law at curvature K.
double tree_stationarity(const CombinedTuple& ct, double K);

struct CurvatureConsensus {
    std::vector<double> estimates;
    double K = 0.0;       // median
    double spread = 0.0;  // max - min
    bool same_sphere = false;
};

CurvatureConsensus curvature_consensus(const std::vector<EdgeTuple>& tuples, CurvatureSign sign, double k_lo,
                                       double k_hi, double spread_tol = 1e-6);
CurvatureConsensus curvature_consensus(const std::vector<CombinedTuple>& tuples, CurvatureSign sign, double k_lo,
                                       double k_hi, double spread_tol = 1e-6);

// Combined tuples (tree point + vertices) of every floating entry, with the
// weights the solution was computed for.
CurvatureConsensus multitree_curvature_consensus(const MultitreeSolution& ms, CurvatureSign sign, double k_lo,
                                                 double k_hi, double spread_tol = 1e-6);

} // namespace ffm

#endif
