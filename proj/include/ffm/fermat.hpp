#ifndef FFM_FERMAT_HPP
#define FFM_FERMAT_HPP

#include "ffm/edge_tuple.hpp"
#include "ffm/enumeration.hpp"
#include "ffm/geometry.hpp"

#include <vector>

namespace ffm {

using Weights = std::vector<double>;

struct Classification {
    bool floating = true;
    int absorbed_at = -1;         // first absorbing vertex, 0-based
    std::vector<int> absorbing;   // every vertex satisfying the absorbing inequality
    std::vector<double> margins;  // (B_k^2 - sum_{i!=k} B_i^2)/2 - sum_{i<j} B_i B_j cos(A_i A_k A_j)
};

struct FermatTree {
    Vec point;                       // A_0 in the model of the space
    std::vector<double> branches;    // a_0i
    bool floating = true;
    int absorbed_at = -1;
    double objective = 0.0;          // sum B_i a_0i
    double residual = 0.0;           // |sum B_i u_i| (floating) or subgradient excess (absorbed)
    int iterations = 0;
};

struct SolverOptions {
    double tol_rel = 1e-9;           // stationarity tolerance relative to sum B_i
    int max_iter = 100000;
    bool newton = true;              // Riemannian Newton steps when the Hessian is positive definite
    bool enforce_convexity_radius = true;  // K > 0: require ell <= pi / (4 kappa)
};

void check_weights(const Weights& w, int m);

// Spherical edges must stay inside the convexity radius. Throws Infeasible.
void check_convexity_radius(const EdgeTuple& t, const CurvedSpace& sp);

Classification classify(const EdgeTuple& t, const Weights& w, const CurvedSpace& sp);
Classification classify(const SimplexRealization& r, const Weights& w, const SolverOptions& opts = {});

double fermat_objective(const Vec& x, const SimplexRealization& r, const Weights& w);
// sum B_i u_i with u_i the unit tangent at x towards A_i (terms with x == A_i are skipped).
Vec weighted_unit_sum(const Vec& x, const SimplexRealization& r, const Weights& w);

FermatTree solve_fermat(const SimplexRealization& r, const Weights& w, const SolverOptions& opts = {});

// Build a tree record for an arbitrary point (used by checks and tests).
FermatTree tree_at(const Vec& x, const SimplexRealization& r, const Weights& w);

// max_j |(B_1 + sum_{i!=1} B_i cos a_{10i}) - (B_j + sum_{i!=j} B_i cos a_{j0i})| / sum B,
// angles at A_0 from the cosine law of the geometry. Floating trees only.
double first_order_residual(const FermatTree& tree, const SimplexRealization& r, const Weights& w);
double first_order_residual(const std::vector<double>& branches, const EdgeTuple& t, const Weights& w,
                            const CurvedSpace& sp);

// |Vol - sum_j Vol(A_0 replacing A_j)| / Vol from Cayley-Menger volumes. K = 0 only.
double volume_additivity_check(const FermatTree& tree, const SimplexRealization& r);

// Regular-simplex circumdiameter for the mean edge; literal = printed variant.
double branch_bound(const EdgeTuple& t, int N, bool literal = false);
bool branch_bound_check(const FermatTree& tree, const EdgeTuple& t, int N, bool literal = false);

struct MultitreeEntry {
    CanonicalAssignment assignment;
    FermatTree tree;
};

struct MultitreeSolution {
    CurvedSpace space;
    Weights weights;
    std::vector<MultitreeEntry> entries;
    bool exhaustive = true;
};

// Enumerate, then classify and solve each member. Weights refer to the
// vertex order of each canonical representative.
MultitreeSolution multitree_solve(const std::vector<double>& lengths, const Weights& w, const CurvedSpace& sp,
                                  const EnumerationOptions& eopts = {}, const SolverOptions& sopts = {});

struct KPlaneResidual {
    double sine_cosine_law = 0.0;  // a_03 through the sine law vs the cosine law
    double weight_angle = 0.0;     // angle A_1 A_0 A_2 from the weights vs the cosine law
    double max() const { return sine_cosine_law > weight_angle ? sine_cosine_law : weight_angle; }
};

// Triangle on the K-plane (N = 2), floating tree. Both residuals are
// normalized so that they stay comparable as K -> 0.
KPlaneResidual kplane_triangle_equations_residual(const FermatTree& tree, const EdgeTuple& triangle,
                                                  const Weights& w, double K);

} // namespace ffm

#endif
