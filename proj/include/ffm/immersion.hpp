#ifndef FFM_IMMERSION_HPP
#define FFM_IMMERSION_HPP

#include "ffm/fermat.hpp"
#include "ffm/realizability.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ffm {

// Tree point (index 0) plus the boundary vertices (indices 1..m). Weights are
// carried along for reporting; they never enter a realizability decision.
struct CombinedTuple {
    EdgeTuple edges;
    Weights weights;  // B_1..B_m, then 1 for every boundary edge

    static CombinedTuple from_tree(const FermatTree& tree, const EdgeTuple& boundary, const Weights& w);
    int points() const { return edges.m(); }
};

struct ImmersionReport {
    bool in_dw = false;
    RealizabilityReport realizability;  // Euclidean, rank = points - 1
    bool immersed() const { return in_dw && realizability.realizable; }
};

// DW membership and Euclidean realizability of the combined tuple as a
// (points - 1)-simplex; both flags are reported separately.
ImmersionReport godel_immersion_check(const CombinedTuple& ct);

struct RhoSearch {
    std::optional<double> rho0;
    std::string cause;          // set when rho0 is empty
    std::vector<double> grid;   // coarse grid that was scanned
    std::vector<bool> grid_realizable;
};

// Smallest rho in [rho_lo, rho_hi] (to relative tol) at which the combined
// tuple is spherically realizable at full rank on the sphere of radius rho.
RhoSearch schoenberg_rho_search(const EdgeTuple& t, double rho_lo, double rho_hi, double tol = 1e-10,
                                int grid_points = 200);

struct SweepRow {
    EdgeTuple edges;
    double edge_sum = 0.0;
    bool in_dw = false;
    bool realizable = false;
    std::optional<FermatTree> tree;
    std::optional<ImmersionReport> immersion;
    std::string error;
};

struct SweepReport {
    double baseline_sum = 0.0;
    double max_sum_drift = 0.0;  // max |sum(perturbed) - baseline_sum|
    std::vector<SweepRow> rows;
    std::vector<int> dw_exits;   // rows that left the DW domain
};

struct SweepOptions {
    double max_eps = 0.1;
    SolverOptions solver;
};

// Each perturbation is a symmetric matrix with zero diagonal and zero total;
// row i evaluates boundary + eps[i].
SweepReport isoperimetric_perturbation_sweep(const EdgeTuple& boundary, const std::vector<Mat>& eps, const Weights& w,
                                             const CurvedSpace& sp, const SweepOptions& opts = {});

// Inverse weights normalized to sum 1.
Weights normalized_weight_solve(const SimplexRealization& r, const Vec& A0);

} // namespace ffm

#endif
