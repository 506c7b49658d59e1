#include "ffm/immersion.hpp"
#include "ffm/dekster_wilker.hpp"
#include "ffm/enumeration.hpp"
#include "ffm/errors.hpp"
#include "ffm/inverse_infinity.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace ffm {

CombinedTuple CombinedTuple::from_tree(const FermatTree& tree, const EdgeTuple& boundary, const Weights& w) {
    const int m = boundary.m();
    if (static_cast<int>(tree.branches.size()) != m) throw InvalidInput("tree and boundary sizes differ");
    check_weights(w, m);
    Mat a = Mat::Zero(m + 1, m + 1);
    a.bottomRightCorner(m, m) = boundary.matrix();
    for (int i = 0; i < m; ++i) {
        if (!(tree.branches[i] > 0.0)) throw Infeasible("tree point coincides with a vertex");
        a(0, i + 1) = a(i + 1, 0) = tree.branches[i];
    }
    CombinedTuple ct{EdgeTuple(a), w};
    ct.weights.insert(ct.weights.end(), m * (m - 1) / 2, 1.0);
    return ct;
}

ImmersionReport godel_immersion_check(const CombinedTuple& ct) {
    const int n = ct.points() - 1;
    ImmersionReport rep;
    rep.in_dw = in_dw_euclidean(ct.edges, n);
    rep.realizability = schoenberg_euclidean(ct.edges, n);
    if (!rep.in_dw && rep.realizability.cause.empty()) rep.realizability.cause = "outside the Dekster-Wilker domain";
    return rep;
}

RhoSearch schoenberg_rho_search(const EdgeTuple& t, double rho_lo, double rho_hi, double tol, int grid_points) {
    if (!(rho_lo > 0.0) || !(rho_hi > rho_lo)) throw InvalidInput("invalid radius range");
    if (grid_points < 2) throw InvalidInput("grid needs at least two points");
    const int r = t.m();
    RhoSearch out;
    if (t.ell() > M_PI * rho_hi) {
        out.cause = "edge exceeds pi*rho_hi";
        return out;
    }
    auto ok = [&](double rho) { return t.ell() <= M_PI * rho && schoenberg_spherical(t, rho, r).realizable; };
    const double ratio = std::log(rho_hi / rho_lo);
    int first = -1;
    for (int i = 0; i < grid_points; ++i) {
        const double rho = rho_lo * std::exp(ratio * i / (grid_points - 1));
        out.grid.push_back(rho);
        out.grid_realizable.push_back(ok(rho));
        if (first < 0 && out.grid_realizable.back()) first = i;
    }
    if (first < 0) {
        out.cause = "not realizable on any sphere in range";
        return out;
    }
    if (first == 0) {
        out.rho0 = rho_lo;
        return out;
    }
    double lo = out.grid[first - 1], hi = out.grid[first];
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    out.rho0 = hi;
    return out;
}

namespace {

double upper_sum(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j) s += a(i, j);
    return s;
}

void check_perturbation(const Mat& e, const EdgeTuple& base, double max_eps) {
    const int m = base.m();
    if (e.rows() != m || e.cols() != m) throw InvalidInput("perturbation size must match the boundary");
    double scale = 0.0;
    for (int i = 0; i < m; ++i) {
        if (e(i, i) != 0.0) throw InvalidInput("perturbation diagonal must vanish");
        for (int j = i + 1; j < m; ++j) {
            if (e(i, j) != e(j, i)) throw InvalidInput("perturbation must be symmetric");
            if (std::abs(e(i, j)) > max_eps) throw InvalidInput("perturbation exceeds max_eps");
            if (!(base(i, j) + e(i, j) > 0.0)) throw InvalidInput("perturbed length must stay positive");
            scale += std::abs(e(i, j)) + base(i, j);
        }
    }
    if (std::abs(upper_sum(e)) > 1e-12 * scale) throw InvalidInput("perturbations must sum to zero");
}

} // namespace

SweepReport isoperimetric_perturbation_sweep(const EdgeTuple& boundary, const std::vector<Mat>& eps, const Weights& w,
                                             const CurvedSpace& sp, const SweepOptions& opts) {
    if (boundary.m() != sp.N + 1) throw InvalidInput("boundary must have N + 1 vertices");
    check_weights(w, boundary.m());
    for (const Mat& e : eps) check_perturbation(e, boundary, opts.max_eps);

    SweepReport rep;
    rep.baseline_sum = upper_sum(boundary.matrix());
    rep.rows.resize(eps.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < eps.size();) {
            SweepRow& row = rep.rows[i];
            row.edges = EdgeTuple(Mat(boundary.matrix() + eps[i]));
            row.edge_sum = upper_sum(row.edges.matrix());
            row.in_dw = in_dw(row.edges, sp.N, sp.K);
            try {
                const RealizabilityReport rr = realize_in(row.edges, sp);
                row.realizable = rr.realizable;
                if (!rr.realizable) {
                    row.error = rr.cause;
                    continue;
                }
                row.tree = solve_fermat(*rr.witness, w, opts.solver);
                if (row.tree->floating)
                    row.immersion = godel_immersion_check(CombinedTuple::from_tree(*row.tree, row.edges, w));
            } catch (const std::exception& ex) {
                row.error = ex.what();
            }
        }
    };
    const int workers = std::min<int>(worker_count(0), std::max<int>(1, static_cast<int>(eps.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < workers; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        rep.max_sum_drift = std::max(rep.max_sum_drift, std::abs(rep.rows[i].edge_sum - rep.baseline_sum));
        if (!rep.rows[i].in_dw) rep.dw_exits.push_back(static_cast<int>(i));
    }
    return rep;
}

Weights normalized_weight_solve(const SimplexRealization& r, const Vec& A0) { return inverse_weights(A0, r, 1.0).weights; }

} // namespace ffm
