#include "ffm/enumeration.hpp"
#include "ffm/dekster_wilker.hpp"
#include "ffm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

namespace ffm {

std::uint64_t max_count(int N) {
    if (N < 2) throw InvalidInput("N must be >= 2");
    const std::uint64_t edges = static_cast<std::uint64_t>(N) * (N + 1) / 2;
    std::uint64_t r = 1;
    for (std::uint64_t i = N + 2; i <= edges; ++i)
        if (__builtin_mul_overflow(r, i, &r)) throw NumericalFailure("max_count overflows 64 bits");
    return r;
}

double stirling_bound(int N) {
    if (N < 2) throw InvalidInput("N must be >= 2");
    const double n = N;
    const double e = n * (n + 1) / 2;
    // theta_1 = 1 and theta_2 = 0 maximize the estimate
    const double log_b = (n * (n + 1) + 1) / 2 * std::log(e) - (n + 1.5) * std::log(n + 1) -
                         (n + 1) * (n / 2 - 1) + 1.0 / (6 * n * (n + 1));
    return std::exp(log_b);
}

double quantize(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return std::strtod(buf, nullptr);
}

int worker_count(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("FERMAT_FRECHET_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

namespace {

// For every vertex relabeling, the source index of each upper-triangle slot.
struct RelabelTable {
    int m = 0;
    int edges = 0;
    std::vector<std::vector<int>> maps;

    explicit RelabelTable(int points) : m(points), edges(points * (points - 1) / 2) {
        std::vector<std::vector<int>> pos(m, std::vector<int>(m, -1));
        int e = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) pos[i][j] = pos[j][i] = e++;
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<int> map;
            map.reserve(edges);
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) map.push_back(pos[perm[i]][perm[j]]);
            maps.push_back(std::move(map));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    // true if no relabeling yields a lexicographically smaller sequence
    bool is_canonical(const std::vector<double>& s) const {
        for (const auto& map : maps) {
            for (int e = 0; e < edges; ++e) {
                const double v = s[map[e]];
                if (v < s[e]) return false;
                if (v > s[e]) break;
            }
        }
        return true;
    }

    std::vector<double> minimal(const std::vector<double>& s) const {
        std::vector<double> best = s, cur(edges);
        for (const auto& map : maps) {
            for (int e = 0; e < edges; ++e) cur[e] = s[map[e]];
            if (cur < best) best = cur;
        }
        return best;
    }
};

std::vector<double> quantized_upper(const EdgeTuple& t) {
    auto u = t.upper();
    for (double& x : u) x = quantize(x);
    return u;
}

bool accept(const std::vector<double>& key, int m, const CurvedSpace& sp, const EnumerationOptions& opts,
            CanonicalAssignment& out) {
    EdgeTuple t = EdgeTuple::from_upper(key, m);
    out.in_dw = in_dw(t, sp.N, sp.K);
    if (opts.require_dw && !out.in_dw) return false;
    RealizabilityReport rep = realize_in(t, sp);
    if (!rep.realizable) return false;
    out.edges = std::move(t);
    out.key = key;
    out.report = std::move(rep);
    return true;
}

} // namespace

std::vector<double> canonical_key(const EdgeTuple& t) {
    if (t.m() > 8) throw InvalidInput("canonical_key limited to at most 8 points");
    return RelabelTable(t.m()).minimal(quantized_upper(t));
}

EdgeTuple canonical_form(const EdgeTuple& t) { return EdgeTuple::from_upper(canonical_key(t), t.m()); }

FrechetMultisimplex enumerate_incongruent(const std::vector<double>& lengths, const CurvedSpace& sp,
                                          const EnumerationOptions& opts) {
    const int N = sp.N;
    const std::size_t edges = static_cast<std::size_t>(N) * (N + 1) / 2;
    if (lengths.size() != edges) throw InvalidInput("length multiset must contain N(N+1)/2 values");
    for (double x : lengths)
        if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput("lengths must be positive and finite");
    if (N >= 5 && !opts.sampling) throw InvalidInput("N >= 5 requires sampling mode");
    if (N > 7) throw InvalidInput("N > 7 is not supported");

    const int m = N + 1;
    const RelabelTable table(m);
    std::vector<double> sorted(lengths);
    for (double& x : sorted) x = quantize(x);
    std::sort(sorted.begin(), sorted.end());

    FrechetMultisimplex out;
    out.space = sp;
    out.exhaustive = !opts.sampling;
    std::mutex mu;
    std::vector<std::vector<double>> classes;
    const int workers = worker_count(opts.threads);

    if (!opts.sampling) {
        // a canonical sequence starts with the minimum; split the rest by its second entry
        std::vector<std::vector<double>> tasks;
        std::vector<double> rest(sorted.begin() + 1, sorted.end());
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (i > 0 && rest[i] == rest[i - 1]) continue;
            std::vector<double> task{sorted[0], rest[i]};
            for (std::size_t j = 0; j < rest.size(); ++j)
                if (j != i) task.push_back(rest[j]);
            tasks.push_back(std::move(task));
        }
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            std::vector<std::vector<double>> local;
            for (std::size_t ti; (ti = next.fetch_add(1)) < tasks.size();) {
                std::vector<double> s = tasks[ti];
                do {
                    if (table.is_canonical(s)) local.push_back(s);
                } while (std::next_permutation(s.begin() + 2, s.end()));
            }
            std::lock_guard<std::mutex> lock(mu);
            classes.insert(classes.end(), local.begin(), local.end());
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
    } else {
        std::set<std::vector<double>> seen;
        std::atomic<long> next{0};
        auto work = [&]() {
            std::set<std::vector<double>> local;
            for (long i; (i = next.fetch_add(1)) < opts.samples;) {
                std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(i)};
                std::mt19937_64 rng(seq);
                std::vector<double> s = sorted;
                std::shuffle(s.begin(), s.end(), rng);
                local.insert(table.minimal(s));
            }
            std::lock_guard<std::mutex> lock(mu);
            seen.insert(local.begin(), local.end());
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
        classes.assign(seen.begin(), seen.end());
    }

    std::sort(classes.begin(), classes.end());
    out.classes_examined = static_cast<long>(classes.size());
    for (const auto& key : classes) {
        CanonicalAssignment ca;
        if (accept(key, m, sp, opts, ca)) out.members.push_back(std::move(ca));
    }
    return out;
}

} // namespace ffm
