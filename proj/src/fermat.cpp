#include "ffm/fermat.hpp"
#include "ffm/errors.hpp"
#include "ffm/realizability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace ffm {

void check_weights(const Weights& w, int m) {
    if (static_cast<int>(w.size()) != m) throw InvalidInput("weight vector size must match the vertex count");
    for (double b : w)
        if (!(b > 0.0) || !std::isfinite(b)) throw InvalidInput("weights must be positive and finite");
}

void check_convexity_radius(const EdgeTuple& t, const CurvedSpace& sp) {
    if (!sp.spherical()) return;
    const double limit = std::numbers::pi / (4.0 * sp.kappa());
    if (t.ell() > limit * (1.0 + 1e-12))
        throw Infeasible("spherical edge exceeds the convexity radius pi/(4 kappa)");
}

Classification classify(const EdgeTuple& t, const Weights& w, const CurvedSpace& sp) {
    const int m = t.m();
    check_weights(w, m);
    Classification c;
    c.margins.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double lhs = 0.0, sq = 0.0;
        for (int i = 0; i < m; ++i) {
            if (i == k) continue;
            sq += w[i] * w[i];
            for (int j = i + 1; j < m; ++j) {
                if (j == k) continue;
                lhs += w[i] * w[j] * cos_vertex_angle(t(k, i), t(k, j), t(i, j), sp);
            }
        }
        const double rhs = 0.5 * (w[k] * w[k] - sq);
        c.margins[k] = rhs - lhs;
        if (c.margins[k] >= 0.0) c.absorbing.push_back(k);
    }
    if (!c.absorbing.empty()) {
        c.floating = false;
        c.absorbed_at = c.absorbing.front();
    }
    return c;
}

Classification classify(const SimplexRealization& r, const Weights& w, const SolverOptions& opts) {
    const EdgeTuple t = EdgeTuple::measure(r);
    if (opts.enforce_convexity_radius) check_convexity_radius(t, r.space);
    return classify(t, w, r.space);
}

double fermat_objective(const Vec& x, const SimplexRealization& r, const Weights& w) {
    double f = 0.0;
    for (int i = 0; i < r.size(); ++i) f += w[i] * geodesic_distance(x, r.vertices[i], r.space);
    return f;
}

Vec weighted_unit_sum(const Vec& x, const SimplexRealization& r, const Weights& w) {
    Vec s = Vec::Zero(x.size());
    for (int i = 0; i < r.size(); ++i) {
        const Vec v = log_map(x, r.vertices[i], r.space);
        const double n = tangent_norm(v, r.space);
        if (n > 0.0) s += (w[i] / n) * v;
    }
    return s;
}

FermatTree tree_at(const Vec& x, const SimplexRealization& r, const Weights& w) {
    check_weights(w, r.size());
    FermatTree t;
    t.point = x;
    for (int i = 0; i < r.size(); ++i) t.branches.push_back(geodesic_distance(x, r.vertices[i], r.space));
    t.objective = fermat_objective(x, r, w);
    t.residual = tangent_norm(weighted_unit_sum(x, r, w), r.space);
    return t;
}

namespace {

double diameter(const SimplexRealization& r) {
    double d = 0.0;
    for (int i = 0; i < r.size(); ++i)
        for (int j = i + 1; j < r.size(); ++j) d = std::max(d, geodesic_distance(r.vertices[i], r.vertices[j], r.space));
    return d;
}

// Second fundamental coefficient of the distance function along directions
// orthogonal to the geodesic.
double hessian_coeff(double d, const CurvedSpace& sp) {
    if (sp.flat()) return 1.0 / d;
    const double k = sp.kappa();
    if (sp.spherical()) return k / std::tan(k * d);
    return k / std::tanh(k * d);
}

} // namespace

FermatTree solve_fermat(const SimplexRealization& r, const Weights& w, const SolverOptions& opts) {
    const int m = r.size();
    check_weights(w, m);
    for (const auto& v : r.vertices) check_point(v, r.space);
    const CurvedSpace& sp = r.space;
    const Classification cls = classify(r, w, opts);
    if (!cls.floating) {
        const int k = cls.absorbed_at;
        FermatTree t = tree_at(r.vertices[k], r, w);
        t.floating = false;
        t.absorbed_at = k;
        t.branches[k] = 0.0;
        t.residual = std::max(0.0, t.residual - w[k]);
        return t;
    }

    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    const double tol = opts.tol_rel * wsum;
    const double diam = diameter(r);
    const double max_step = sp.spherical() ? std::min(diam, std::numbers::pi / (4.0 * sp.kappa())) : diam;

    Vec mean = Vec::Zero(r.vertices[0].size());
    for (int i = 0; i < m; ++i) mean += w[i] * r.vertices[i];
    Vec x = project_to_model(mean / wsum, sp);

    auto objective_and_sum = [&](const Vec& p, Vec& s, std::vector<double>& dist, std::vector<Vec>& units) {
        s = Vec::Zero(p.size());
        double f = 0.0;
        for (int i = 0; i < m; ++i) {
            const Vec v = log_map(p, r.vertices[i], sp);
            const double d = tangent_norm(v, sp);
            dist[i] = d;
            f += w[i] * d;
            units[i] = d > 0.0 ? Vec(v / d) : Vec(Vec::Zero(p.size()));
            s += w[i] * units[i];
        }
        return f;
    };

    std::vector<double> dist(m);
    std::vector<Vec> units(m);
    Vec s;
    double f = objective_and_sum(x, s, dist, units);
    double res = tangent_norm(s, sp);
    int it = 0, polish = 0;
    for (; it < opts.max_iter; ++it) {
        // a couple of extra Newton steps past tol are nearly free and sharpen the point
        if (res <= tol && (!opts.newton || polish++ >= 2 || res == 0.0)) break;
        const Mat basis = tangent_basis(x, sp);
        const int n = static_cast<int>(basis.cols());
        Vec g(n);  // gradient of f in basis coordinates
        for (int j = 0; j < n; ++j) g[j] = -model_inner(s, basis.col(j), sp);

        Vec dir = -g;
        bool newton = false;
        if (opts.newton) {
            Mat h = Mat::Zero(n, n);
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
                if (dist[i] <= 1e-14 * diam) {
                    ok = false;
                    break;
                }
                Vec u(n);
                for (int j = 0; j < n; ++j) u[j] = model_inner(units[i], basis.col(j), sp);
                h += w[i] * hessian_coeff(dist[i], sp) * (Mat::Identity(n, n) - u * u.transpose());
            }
            if (ok) {
                Eigen::LLT<Mat> llt(h);
                if (llt.info() == Eigen::Success) {
                    const Vec p = llt.solve(-g);
                    if (p.allFinite() && p.dot(g) < 0.0) {
                        dir = p;
                        newton = true;
                    }
                }
            }
        }
        if (!newton) dir *= diam / wsum;  // curvature of f is of order sum B / diam
        if (dir.norm() > max_step) dir *= max_step / dir.norm();

        auto try_direction = [&](const Vec& d) {
            const double slope = g.dot(d);
            double step = 1.0;
            Vec sn;
            std::vector<double> dn(m);
            std::vector<Vec> un(m);
            for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
                Vec xn;
                try {
                    xn = exp_map(x, basis * (step * d), sp);
                } catch (const Infeasible&) {
                    continue;
                }
                const double fn = objective_and_sum(xn, sn, dn, un);
                const double rn = tangent_norm(sn, sp);
                const bool armijo = fn <= f + 1e-4 * step * slope;
                // near the optimum f stops resolving progress; accept steps that reduce the residual
                const bool flat_progress = std::abs(fn - f) <= 64 * 2.2e-16 * std::abs(f) && rn < res;
                if (armijo || flat_progress) {
                    x = xn;
                    f = fn;
                    s = sn;
                    res = rn;
                    dist = dn;
                    units = un;
                    return true;
                }
            }
            return false;
        };
        if (!try_direction(dir)) {
            if (newton) {
                Vec gd = -g * (diam / wsum);
                if (gd.norm() > max_step) gd *= max_step / gd.norm();
                if (try_direction(gd)) continue;
            }
            break;
        }
    }
    if (res > tol) {
        throw NumericalFailure(it >= opts.max_iter ? "Fermat solver hit the iteration cap"
                                                   : "Fermat solver line search stalled");
    }
    FermatTree t;
    t.point = x;
    t.branches = dist;
    t.objective = f;
    t.residual = res;
    t.iterations = it;
    return t;
}

double first_order_residual(const FermatTree& tree, const SimplexRealization& r, const Weights& w) {
    if (!tree.floating) throw InvalidInput("first-order identities apply to floating trees only");
    return first_order_residual(tree.branches, EdgeTuple::measure(r), w, r.space);
}

double first_order_residual(const std::vector<double>& branches, const EdgeTuple& t, const Weights& w,
                            const CurvedSpace& sp) {
    const int m = t.m();
    check_weights(w, m);
    if (static_cast<int>(branches.size()) != m) throw InvalidInput("branch count must match the vertex count");
    std::vector<double> bracket(m);
    for (int j = 0; j < m; ++j) {
        double b = w[j];
        for (int i = 0; i < m; ++i) {
            if (i == j) continue;
            b += w[i] * cos_vertex_angle(branches[j], branches[i], t(i, j), sp);
        }
        bracket[j] = b;
    }
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    double worst = 0.0;
    for (int j = 1; j < m; ++j) worst = std::max(worst, std::abs(bracket[0] - bracket[j]) / wsum);
    return worst;
}

double volume_additivity_check(const FermatTree& tree, const SimplexRealization& r) {
    if (!r.space.flat()) throw InvalidInput("volume additivity is checked for K = 0 only");
    if (!tree.floating) throw InvalidInput("volume additivity needs a floating tree");
    const int m = r.size();
    Mat a = Mat::Zero(m + 1, m + 1);
    const Mat d = r.distances();
    a.bottomRightCorner(m, m) = d;
    for (int i = 0; i < m; ++i) a(0, i + 1) = a(i + 1, 0) = tree.branches[i];
    const EdgeTuple all(a);
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 1);
    const double vol = euclidean_volume(all.sub(idx));
    if (vol <= 1e-12 * std::pow(all.sub(idx).ell(), m - 1)) throw InvalidInput("degenerate simplex has no volume");
    double parts = 0.0;
    for (int j = 0; j < m; ++j) {
        std::vector<int> sub = idx;
        sub[j] = 0;
        parts += euclidean_volume(all.sub(sub));
    }
    return std::abs(vol - parts) / vol;
}

double branch_bound(const EdgeTuple& t, int N, bool literal) {
    const auto u = t.upper();
    const double a = std::accumulate(u.begin(), u.end(), 0.0) / u.size();
    if (literal) return 2.0 * std::sqrt(N / (a * (N + 1.0)));
    return a * std::sqrt(2.0 * N / (N + 1.0));
}

bool branch_bound_check(const FermatTree& tree, const EdgeTuple& t, int N, bool literal) {
    const double b = branch_bound(t, N, literal);
    return std::all_of(tree.branches.begin(), tree.branches.end(), [&](double x) { return x < b; });
}

MultitreeSolution multitree_solve(const std::vector<double>& lengths, const Weights& w, const CurvedSpace& sp,
                                  const EnumerationOptions& eopts, const SolverOptions& sopts) {
    check_weights(w, sp.N + 1);
    FrechetMultisimplex ms = enumerate_incongruent(lengths, sp, eopts);
    MultitreeSolution out;
    out.space = sp;
    out.weights = w;
    out.exhaustive = ms.exhaustive;
    out.entries.resize(ms.members.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto work = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < ms.members.size();) {
            try {
                out.entries[i].tree = solve_fermat(*ms.members[i].report.witness, w, sopts);
                out.entries[i].assignment = ms.members[i];
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::min<int>(worker_count(eopts.threads), std::max<std::size_t>(1, ms.members.size()));
    std::vector<std::thread> pool;
    for (int k = 1; k < workers; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

KPlaneResidual kplane_triangle_equations_residual(const FermatTree& tree, const EdgeTuple& tri, const Weights& w,
                                                  double K) {
    if (tri.m() != 3) throw InvalidInput("K-plane equations need a triangle");
    if (!tree.floating) throw InvalidInput("K-plane equations need a floating tree");
    check_weights(w, 3);
    const double b1 = w[0], b2 = w[1], b3 = w[2];
    const double c2 = (b2 * b2 - b1 * b1 - b3 * b3) / (2 * b1 * b3);  // cos of angle A_1 A_0 A_3
    const double c3 = (b3 * b3 - b1 * b1 - b2 * b2) / (2 * b1 * b2);  // cos of angle A_1 A_0 A_2
    const double c1 = (b1 * b1 - b2 * b2 - b3 * b3) / (2 * b2 * b3);
    if (std::abs(c1) > 1.0 || std::abs(c2) > 1.0 || std::abs(c3) > 1.0)
        throw InvalidInput("weights admit no Fermat angles");
    const CurvedSpace sp(K, 2);
    const double a01 = tree.branches[0], a02 = tree.branches[1];
    const double a12 = tri(0, 1), a13 = tri(0, 2), a23 = tri(1, 2);
    const double ell = tri.ell();
    const double th2 = std::acos(c2);
    const double cos213 = cos_vertex_angle(a12, a13, a23, sp);
    const double cos201 = cos_vertex_angle(a01, a12, a02, sp);
    const double sin213 = std::sqrt(std::max(0.0, 1 - cos213 * cos213));
    const double sin201 = std::sqrt(std::max(0.0, 1 - cos201 * cos201));
    const double ang = std::acos(cos213) - std::acos(cos201);  // angle A_0 A_1 A_3
    const double cos_ang = cos213 * cos201 + sin213 * sin201;

    KPlaneResidual out;
    if (K == 0.0) {
        const double sine_law = a13 * std::sin(ang) / std::sin(th2);
        const double cosine_law = a01 * a01 + a13 * a13 - 2 * a01 * a13 * cos_ang;
        out.sine_cosine_law = std::abs(sine_law * sine_law - cosine_law) / (ell * ell);
        const double l = a12 * a12 - a01 * a01 - a02 * a02;
        const double r = 2 * a01 * a02 * c3;
        out.weight_angle = std::abs(l * l - r * r) / std::pow(ell, 4);
        return out;
    }
    const double sigma = K > 0.0 ? 1.0 : -1.0;
    const double k = sp.kappa();
    auto C = [&](double x) { return cos_k(x, sp); };
    auto S = [&](double x) { return sin_k(x, sp); };
    const double sine_law = S(a13) * std::sin(ang) / std::sin(th2);
    const double lhs22 = 1.0 - sigma * sine_law * sine_law;
    const double rhs22_root = C(a01) * C(a13) + sigma * S(a01) * S(a13) * cos_ang;
    out.sine_cosine_law = std::abs(lhs22 - rhs22_root * rhs22_root) / (k * k * ell * ell);
    const double l = C(a12) - C(a01) * C(a02);
    const double r = S(a01) * S(a02) * c3;
    out.weight_angle = std::abs(l * l - r * r) / (0.25 * std::pow(k * ell, 4));
    return out;
}

} // namespace ffm
