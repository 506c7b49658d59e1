#include "CLI11.hpp"
#include "json.hpp"

#include "ffm/curvature.hpp"
#include "ffm/dekster_wilker.hpp"
#include "ffm/enumeration.hpp"
#include "ffm/errors.hpp"
#include "ffm/fermat.hpp"
#include "ffm/immersion.hpp"
#include "ffm/inverse_infinity.hpp"
#include "ffm/realizability.hpp"
#include "ffm/tetrahedron_3k.hpp"
#include "svg_plot.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace ffm;

namespace {

constexpr const char* kSchema = "ffm-1";
constexpr double kFirstOrderTol = 1e-7;
constexpr double kStationaryTol = 1e-8;
constexpr double kAdditivityTol = 1e-9;
constexpr double kMeasureTol = 1e-9;

struct Flags {
    std::string in, out, plot, lengths_file, weights_file;
    std::optional<int> n;
    std::optional<double> k;
};

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

// Problem object from --in, then overridden by the individual flags. A
// lengths/weights file holds either a bare array or an object with that key.
json load_problem(const Flags& fl) {
    json p = fl.in.empty() ? json::object() : read_json_file(fl.in);
    if (!p.is_object()) throw InvalidInput("problem file must hold a JSON object");
    if (fl.n) p["n"] = *fl.n;
    if (fl.k) p["k"] = *fl.k;
    auto field = [](const std::string& path, const char* key) {
        json v = read_json_file(path);
        return v.is_object() ? v.at(key) : v;
    };
    if (!fl.lengths_file.empty()) p["lengths"] = field(fl.lengths_file, "lengths");
    if (!fl.weights_file.empty()) p["weights"] = field(fl.weights_file, "weights");
    return p;
}

template <class T>
T need(const json& p, const char* key) {
    if (!p.contains(key)) throw InvalidInput(std::string("missing field \"") + key + "\"");
    try {
        return p.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("field \"") + key + "\": " + e.what());
    }
}

template <class T>
T opt(const json& p, const char* key, T fallback) {
    const json o = p.value("options", json::object());
    if (!o.contains(key)) return fallback;
    try {
        return o.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("option \"") + key + "\": " + e.what());
    }
}

CurvedSpace space_of(const json& p) {
    const int n = need<int>(p, "n");
    if (n < 2) throw InvalidInput("n must be >= 2");
    return CurvedSpace(need<double>(p, "k"), n);
}

json tolerances() {
    return json{{"psd_rel", kPsdTol},
                {"rank_rel", kRankTol},
                {"stationary_rel", SolverOptions{}.tol_rel},
                {"first_order", kFirstOrderTol},
                {"volume_additivity", kAdditivityTol},
                {"measure", kMeasureTol},
                {"cosine_clamp", 1e-9},
                {"length_digits", 12}};
}

json header(const char* command, const json& input) {
    return json{{"schema", kSchema}, {"command", command}, {"tolerances", tolerances()}, {"input", input}};
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json vertices_json(const SimplexRealization& r) {
    json a = json::array();
    for (const Vec& v : r.vertices) a.push_back(vec_json(v));
    return a;
}

SimplexRealization realization_from(const json& verts, const CurvedSpace& sp) {
    SimplexRealization r{sp, {}};
    for (const auto& v : verts) {
        const auto x = v.get<std::vector<double>>();
        Vec p = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
        if (p.size() != sp.ambient_dim()) throw InvalidInput("vertex has the wrong number of coordinates");
        check_point(p, sp);
        r.vertices.push_back(p);
    }
    return r;
}

double weight_sum(const Weights& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

json tree_json(const FermatTree& t, const Weights& w) {
    return json{{"classification", t.floating ? "floating" : "absorbed"},
                {"absorbed_at", t.floating ? json(nullptr) : json(t.absorbed_at + 1)},
                {"point", vec_json(t.point)},
                {"branches", t.branches},
                {"objective", t.objective},
                {"residual", t.residual / weight_sum(w)},
                {"iterations", t.iterations}};
}

SolverOptions solver_options(const json& p) {
    SolverOptions o;
    o.tol_rel = opt(p, "tol_rel", o.tol_rel);
    o.max_iter = opt(p, "max_iter", o.max_iter);
    o.newton = opt(p, "newton", o.newton);
    o.enforce_convexity_radius = opt(p, "enforce_convexity_radius", o.enforce_convexity_radius);
    return o;
}

EnumerationOptions enumeration_options(const json& p) {
    EnumerationOptions o;
    o.require_dw = opt(p, "require_dw", o.require_dw);
    o.sampling = opt(p, "sampling", o.sampling);
    o.samples = opt(p, "samples", o.samples);
    o.seed = opt(p, "seed", o.seed);
    o.threads = opt(p, "threads", o.threads);
    return o;
}

// Residual checks attached to a solved entry; inapplicable checks are null.
json entry_checks(const FermatTree& t, const SimplexRealization& r, const EdgeTuple& e, const Weights& w) {
    const CurvedSpace& sp = r.space;
    json c;
    c["first_order"] = t.floating ? json(first_order_residual(t, r, w)) : json(nullptr);
    c["volume_additivity"] = sp.flat() && t.floating ? json(volume_additivity_check(t, r)) : json(nullptr);
    c["branch_bound"] = sp.flat() ? json(branch_bound_check(t, e, sp.N)) : json(nullptr);
    c["tetrahedron"] = nullptr;
    c["kplane"] = nullptr;
    if (t.floating && sp.N == 3) {
        const TetraConditions tc = tetra_multitree_conditions(t, e, w, sp.K);
        json j{{"first_order", tc.first_order}, {"volumes_checked", tc.volumes_checked}};
        if (tc.volumes_checked) {
            j["degenerate"] = tc.degenerate;
            j["C"] = tc.C;
            j["tetraed"] = tc.tetraed;
            j["sub_volumes"] = tc.sub_volumes;
            j["comparison_volume"] = tc.comparison_volume;
            j["volume_inequality"] = tc.volume_inequality;
        }
        c["tetrahedron"] = j;
    }
    if (t.floating && sp.N == 2) {
        try {
            const KPlaneResidual k = kplane_triangle_equations_residual(t, e, w, sp.K);
            c["kplane"] = json{{"sine_cosine_law", k.sine_cosine_law}, {"weight_angle", k.weight_angle}};
        } catch (const InvalidInput&) {
        }
    }
    return c;
}

void write_plot(const std::string& path, const std::vector<plot::Panel>& panels) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot write " + path);
    f << plot::render(panels);
}

// ---- subcommands ----

json cmd_enumerate(const json& p) {
    const CurvedSpace sp = space_of(p);
    const auto lengths = need<std::vector<double>>(p, "lengths");
    const FrechetMultisimplex ms = enumerate_incongruent(lengths, sp, enumeration_options(p));
    json out = header("enumerate", p);
    out["exhaustive"] = ms.exhaustive;
    out["max_count"] = max_count(sp.N);
    out["classes_examined"] = ms.classes_examined;
    out["count"] = ms.members.size();
    json members = json::array();
    for (std::size_t i = 0; i < ms.members.size(); ++i) {
        const auto& m = ms.members[i];
        members.push_back(json{{"index", i + 1},
                               {"key", m.key},
                               {"in_dw", m.in_dw},
                               {"rank", m.report.rank},
                               {"volume", sp.flat() ? json(euclidean_volume(m.edges)) : json(nullptr)},
                               {"vertices", vertices_json(*m.report.witness)}});
    }
    out["members"] = members;
    return out;
}

json cmd_solve(const json& p, std::vector<plot::Panel>& panels) {
    const CurvedSpace sp = space_of(p);
    const auto lengths = need<std::vector<double>>(p, "lengths");
    const auto w = need<Weights>(p, "weights");
    const MultitreeSolution sol = multitree_solve(lengths, w, sp, enumeration_options(p), solver_options(p));
    json out = header("solve", p);
    out["exhaustive"] = sol.exhaustive;
    out["max_count"] = max_count(sp.N);
    out["count"] = sol.entries.size();
    json entries = json::array();
    bool all_floating = true;
    for (std::size_t i = 0; i < sol.entries.size(); ++i) {
        const auto& e = sol.entries[i];
        const SimplexRealization& r = *e.assignment.report.witness;
        all_floating = all_floating && e.tree.floating;
        entries.push_back(json{{"index", i + 1},
                               {"key", e.assignment.key},
                               {"in_dw", e.assignment.in_dw},
                               {"vertices", vertices_json(r)},
                               {"tree", tree_json(e.tree, w)},
                               {"checks", entry_checks(e.tree, r, e.assignment.edges, w)}});
        panels.push_back({"#" + std::to_string(i + 1), r, e.tree});
    }
    out["entries"] = entries;
    if (opt(p, "require_floating", false) && !all_floating) throw Infeasible("an entry is absorbed at a vertex");
    return out;
}

json cmd_classify(const json& p, std::vector<plot::Panel>& panels) {
    const CurvedSpace sp = space_of(p);
    const auto lengths = need<std::vector<double>>(p, "lengths");
    const auto w = need<Weights>(p, "weights");
    const int m = points_for_edge_count(lengths.size());
    if (m != sp.N + 1) throw InvalidInput("lengths must describe an N-simplex");
    const EdgeTuple t = EdgeTuple::from_upper(lengths, m);
    const RealizabilityReport rep = realize_in(t, sp);
    if (!rep.realizable) throw Infeasible("simplex is not realizable: " + rep.cause);
    const SolverOptions so = solver_options(p);
    const Classification c = classify(*rep.witness, w, so);
    const FermatTree tree = solve_fermat(*rep.witness, w, so);
    json out = header("classify", p);
    out["classification"] = c.floating ? "floating" : "absorbed";
    out["absorbed_at"] = c.floating ? json(nullptr) : json(c.absorbed_at + 1);
    json abs = json::array();
    for (int k : c.absorbing) abs.push_back(k + 1);
    out["absorbing"] = abs;
    out["margins"] = c.margins;
    out["in_dw"] = in_dw(t, sp.N, sp.K);
    out["vertices"] = vertices_json(*rep.witness);
    out["tree"] = tree_json(tree, w);
    out["checks"] = entry_checks(tree, *rep.witness, t, w);
    panels.push_back({"classify", *rep.witness, tree});
    return out;
}

json cmd_invert(const json& p) {
    const CurvedSpace sp = space_of(p);
    const SimplexRealization r = realization_from(p.at("vertices"), sp);
    const auto x = need<std::vector<double>>(p, "point");
    const Vec A0 = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
    if (A0.size() != sp.ambient_dim()) throw InvalidInput("point has the wrong number of coordinates");
    const double csum = p.value("csum", 1.0);
    const InverseResult inv = inverse_weights(A0, r, csum);
    json out = header("invert", p);
    out["weights"] = inv.weights;
    out["conditioning"] = inv.conditioning;
    out["balance"] = inv.balance;
    if (opt(p, "round_trip", false)) {
        const FermatTree t = solve_fermat(r, inv.weights, solver_options(p));
        out["round_trip_distance"] = geodesic_distance(t.point, A0, sp);
    }
    return out;
}

CurvatureSign sign_of(const json& p) {
    const std::string s = p.value("sign", std::string("positive"));
    if (s == "positive") return CurvatureSign::positive;
    if (s == "negative") return CurvatureSign::negative;
    throw InvalidInput("sign must be \"positive\" or \"negative\"");
}

json cmd_estimate_k(const json& p) {
    const auto range = p.value("k_range", std::vector<double>{1e-4, 1e2});
    if (range.size() != 2) throw InvalidInput("k_range must hold two magnitudes");
    const CurvatureSign sign = sign_of(p);
    json out = header("estimate-k", p);
    // point 0 is the tree point; optional weights are its branch weights
    auto tuple_of = [](const std::vector<double>& lengths, const json* w) {
        const int m = points_for_edge_count(lengths.size());
        if (m < 3) throw InvalidInput("lengths must describe at least three points");
        CombinedTuple ct{EdgeTuple::from_upper(lengths, m), {}};
        if (w) {
            ct.weights = w->get<Weights>();
            check_weights(ct.weights, m - 1);
        }
        return ct;
    };
    auto one = [&](const CombinedTuple& ct) {
        const CurvatureEstimate e = ct.weights.empty() ? estimate_curvature(ct.edges, sign, range[0], range[1])
                                                       : estimate_curvature(ct, sign, range[0], range[1]);
        json r{{"k", e.K ? json(*e.K) : json(nullptr)},
               {"radius", e.K ? json(e.radius()) : json(nullptr)},
               {"roots", e.roots},
               {"admissible", e.admissible},
               {"flat_consistent", e.flat_consistent}};
        if (!ct.weights.empty()) r["stationary"] = e.stationary;
        return r;
    };
    const double spread_tol = p.value("spread_tol", 1e-6);
    if (p.contains("tuples")) {
        const json& ts = p.at("tuples");
        const json* ws = p.contains("weights") ? &p.at("weights") : nullptr;
        if (ws && (!ws->is_array() || ws->size() != ts.size()))
            throw InvalidInput("weights must hold one array per tuple");
        std::vector<CombinedTuple> tuples;
        json per = json::array();
        for (std::size_t i = 0; i < ts.size(); ++i) {
            tuples.push_back(tuple_of(ts[i].get<std::vector<double>>(), ws ? &(*ws)[i] : nullptr));
            per.push_back(one(tuples.back()));
        }
        CurvatureConsensus c;
        if (ws) {
            c = curvature_consensus(tuples, sign, range[0], range[1], spread_tol);
        } else {
            std::vector<EdgeTuple> edges;
            for (const auto& ct : tuples) edges.push_back(ct.edges);
            c = curvature_consensus(edges, sign, range[0], range[1], spread_tol);
        }
        out["estimates"] = per;
        out["consensus"] = json{{"k", c.K}, {"spread", c.spread}, {"same_sphere", c.same_sphere}};
    } else {
        out["estimate"] = one(tuple_of(need<std::vector<double>>(p, "lengths"), p.contains("weights") ? &p.at("weights") : nullptr));
    }
    return out;
}

json cmd_immerse(const json& p, std::vector<plot::Panel>& panels) {
    json out = header("immerse", p);
    EdgeTuple combined;
    if (opt(p, "combined", false)) {
        const auto lengths = need<std::vector<double>>(p, "lengths");
        combined = EdgeTuple::from_upper(lengths, points_for_edge_count(lengths.size()));
    } else {
        const CurvedSpace sp = space_of(p);
        const auto lengths = need<std::vector<double>>(p, "lengths");
        const auto w = need<Weights>(p, "weights");
        const EdgeTuple t = EdgeTuple::from_upper(lengths, sp.N + 1);
        const RealizabilityReport rep = realize_in(t, sp);
        if (!rep.realizable) throw Infeasible("boundary simplex is not realizable: " + rep.cause);
        const FermatTree tree = solve_fermat(*rep.witness, w, solver_options(p));
        if (!tree.floating) throw Infeasible("tree is absorbed; the combined tuple is degenerate");
        combined = CombinedTuple::from_tree(tree, t, w).edges;
        out["tree"] = tree_json(tree, w);
        panels.push_back({"tree", *rep.witness, tree});
    }
    CombinedTuple ct{combined, Weights(combined.m() * (combined.m() - 1) / 2, 1.0)};
    const ImmersionReport ir = godel_immersion_check(ct);
    out["combined_lengths"] = combined.upper();
    out["euclidean"] = json{{"in_dw", ir.in_dw},
                            {"realizable", ir.realizability.realizable},
                            {"rank", ir.realizability.rank},
                            {"volume", ir.realizability.volume},
                            {"cause", ir.realizability.cause}};
    const double ell = combined.ell();
    const auto range = p.value("rho_range", std::vector<double>{ell / M_PI * (1 + 1e-9), 1e3 * ell});
    if (range.size() != 2) throw InvalidInput("rho_range must hold two radii");
    const RhoSearch rs = schoenberg_rho_search(combined, range[0], range[1]);
    out["spherical"] = json{{"rho0", rs.rho0 ? json(*rs.rho0) : json(nullptr)}, {"cause", rs.cause}};
    return out;
}

json cmd_limit(const json& p) {
    InfinityFamily fam;
    const auto tri = need<std::vector<double>>(p, "triangle");
    if (tri.size() != 3) throw InvalidInput("triangle must hold a12, a13, a23");
    fam.a12 = tri[0], fam.a13 = tri[1], fam.a23 = tri[2];
    const auto b = need<std::vector<double>>(p, "b"), c = need<std::vector<double>>(p, "c");
    if (b.size() != 3 || c.size() != 3) throw InvalidInput("b and c must hold three values");
    std::copy(b.begin(), b.end(), fam.b.begin());
    std::copy(c.begin(), c.end(), fam.c.begin());
    fam.M = p.value("M", 1e6 * fam.diameter());
    const auto scan = p.value("scan", std::vector<double>{1e2, 1e4, 1e6});
    json out = header("limit", p);
    json rows = json::array();
    const SolverOptions so = solver_options(p);
    for (double M : scan) {
        const InfinityTree it = solve_infinity_tree(fam, M, so);
        const InfinityDistances d = infinity_distances(fam, M);
        rows.push_back(json{{"M", M},
                            {"phi", d.planar.phi},
                            {"a4", d.a4},
                            {"alpha_g4", d.alpha_g4},
                            {"h412", d.h412},
                            {"foot", vec_json(it.foot)},
                            {"foot_distance", it.foot_distance},
                            {"tree", tree_json(it.tree, fam.weights(M))}});
    }
    out["scan"] = rows;
    const bool balanced = opt(p, "balanced", true);
    try {
        out["limit_weights"] = infinity_limit_inverse(fam, balanced);
    } catch (const InvalidInput& e) {
        out["limit_weights"] = nullptr;
        out["limit_weights_cause"] = e.what();
    }
    return out;
}

// Recomputes the residuals of a solve report from its vertices, tree and input.
json cmd_check(const json& rep) {
    if (rep.value("schema", "") != kSchema) throw InvalidInput("not an ffm-1 report");
    if (rep.value("command", "") != "solve" && rep.value("command", "") != "classify")
        throw InvalidInput("check expects a solve or classify report");
    const json& in = rep.at("input");
    const CurvedSpace sp = space_of(in);
    const auto w = need<Weights>(in, "weights");
    const double wsum = weight_sum(w);
    json entries = rep.contains("entries") ? rep.at("entries") : json::array({rep});
    json out = header("check", json{{"n", sp.N}, {"k", sp.K}});
    json rows = json::array();
    bool pass = true;
    for (const auto& e : entries) {
        const SimplexRealization r = realization_from(e.at("vertices"), sp);
        const json& t = e.at("tree");
        const auto x = t.at("point").get<std::vector<double>>();
        const Vec pt = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
        const FermatTree tree = tree_at(pt, r, w);
        const EdgeTuple edges = EdgeTuple::measure(r);
        json row;
        const auto reported = t.at("branches").get<std::vector<double>>();
        double branch_err = 0.0;
        for (std::size_t i = 0; i < reported.size() && i < tree.branches.size(); ++i)
            branch_err = std::max(branch_err, std::abs(reported[i] - tree.branches[i]));
        row["branch_mismatch"] = branch_err;
        bool ok = branch_err <= kMeasureTol * edges.ell();
        if (t.at("classification") == "floating") {
            const double stat = weighted_unit_sum(pt, r, w).norm() / wsum;
            FermatTree ft = tree;
            ft.floating = true;
            const double fo = first_order_residual(ft, r, w);
            row["stationary"] = stat;
            row["first_order"] = fo;
            ok = ok && stat <= kStationaryTol && fo <= kFirstOrderTol;
            if (sp.flat()) {
                const double va = volume_additivity_check(ft, r);
                row["volume_additivity"] = va;
                ok = ok && va <= kAdditivityTol;
            }
        } else {
            const int k = t.at("absorbed_at").get<int>() - 1;
            if (k < 0 || k >= r.size()) throw InvalidInput("absorbed_at out of range");
            // the vertex's own term vanishes in the sum
            const double pull = weighted_unit_sum(r.vertices[k], r, w).norm();
            row["subgradient_excess"] = std::max(0.0, pull - w[k]) / wsum;
            ok = ok && pull <= w[k] * (1 + 1e-9);
        }
        row["pass"] = ok;
        pass = pass && ok;
        rows.push_back(row);
    }
    out["entries"] = rows;
    out["pass"] = pass;
    return out;
}

void emit(const json& j, const std::string& out) {
    const std::string s = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << s;
        return;
    }
    std::ofstream f(out);
    if (!f) throw InvalidInput("cannot write " + out);
    f << s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted Fermat-Frechet multitrees in spaces of constant curvature"};
    app.require_subcommand(1);
    Flags fl;
    auto add_common = [&](CLI::App* sub, bool problem_flags) {
        sub->add_option("--in", fl.in, "problem JSON file");
        sub->add_option("--out", fl.out, "write the JSON report here instead of stdout");
        if (problem_flags) {
            sub->add_option("--n", fl.n, "dimension N");
            sub->add_option("--k", fl.k, "curvature K");
            sub->add_option("--lengths", fl.lengths_file, "JSON file with the length array");
            sub->add_option("--weights", fl.weights_file, "JSON file with the weight array");
        }
    };
    auto* en = app.add_subcommand("enumerate", "incongruent simplexes of a length multiset");
    auto* so = app.add_subcommand("solve", "Fermat-Frechet multitree of a length multiset");
    auto* cl = app.add_subcommand("classify", "floating/absorbing test for one simplex");
    auto* iv = app.add_subcommand("invert", "weights that make a given point the Fermat point");
    auto* ek = app.add_subcommand("estimate-k", "curvature from vanishing curved Cayley-Menger determinants");
    auto* im = app.add_subcommand("immerse", "Euclidean and spherical immersion of a tree plus simplex");
    auto* li = app.add_subcommand("limit", "tetrahedron with a vertex at infinity");
    auto* ch = app.add_subcommand("check", "recompute the residuals of a solve report");
    for (auto* s : {en, so, cl, iv, ek, im, li, ch}) add_common(s, s != ch && s != li);
    for (auto* s : {so, cl, im}) s->add_option("--plot", fl.plot, "write an SVG drawing of the trees");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const json p = load_problem(fl);
        std::vector<plot::Panel> panels;
        json out;
        if (en->parsed()) out = cmd_enumerate(p);
        else if (so->parsed()) out = cmd_solve(p, panels);
        else if (cl->parsed()) out = cmd_classify(p, panels);
        else if (iv->parsed()) out = cmd_invert(p);
        else if (ek->parsed()) out = cmd_estimate_k(p);
        else if (im->parsed()) out = cmd_immerse(p, panels);
        else if (li->parsed()) out = cmd_limit(p);
        else out = cmd_check(p);
        write_plot(fl.plot, panels);
        emit(out, fl.out);
        return out.value("pass", true) ? 0 : 3;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    }
}
