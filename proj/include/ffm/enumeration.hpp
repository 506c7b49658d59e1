#ifndef FFM_ENUMERATION_HPP
#define FFM_ENUMERATION_HPP

#include "ffm/edge_tuple.hpp"
#include "ffm/realizability.hpp"

#include <cstdint>
#include <vector>

namespace ffm {

struct EnumerationOptions {
    bool require_dw = false;
    bool sampling = false;      // mandatory for N >= 5
    long samples = 200000;      // random placements drawn in sampling mode
    std::uint64_t seed = 1;
    int threads = 0;            // 0: hardware concurrency, capped by FERMAT_FRECHET_THREADS
};

struct CanonicalAssignment {
    EdgeTuple edges;          // the canonical representative
    std::vector<double> key;  // its upper triangle, quantized
    RealizabilityReport report;
    bool in_dw = false;
};

struct FrechetMultisimplex {
    CurvedSpace space;
    std::vector<CanonicalAssignment> members;  // sorted by key
    bool exhaustive = true;     // false: member count is a lower bound
    long classes_examined = 0;  // congruence classes before filtering
};

// (N(N+1)/2)! / (N+1)!, with overflow checked.
std::uint64_t max_count(int N);
// Stirling upper estimate of max_count.
double stirling_bound(int N);

// Round to 12 significant digits.
double quantize(double x);

// Lexicographically least quantized upper triangle over all vertex
// relabelings, and the relabeled tuple that attains it.
std::vector<double> canonical_key(const EdgeTuple& t);
EdgeTuple canonical_form(const EdgeTuple& t);

FrechetMultisimplex enumerate_incongruent(const std::vector<double>& lengths, const CurvedSpace& sp,
                                          const EnumerationOptions& opts = {});

// Worker count after applying FERMAT_FRECHET_THREADS.
int worker_count(int requested);

} // namespace ffm

#endif
