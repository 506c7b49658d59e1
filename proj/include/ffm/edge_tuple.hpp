#ifndef FFM_EDGE_TUPLE_HPP
#define FFM_EDGE_TUPLE_HPP

#include "ffm/geometry.hpp"

#include <vector>

namespace ffm {

// Symmetric matrix of pairwise lengths among m labeled points, zero diagonal.
class EdgeTuple {
public:
    EdgeTuple() = default;
    explicit EdgeTuple(Mat lengths);  // validates

    // Upper triangle in row-major order: a_01, a_02, ..., a_{m-2,m-1}.
    static EdgeTuple from_upper(const std::vector<double>& upper, int m);
    static EdgeTuple measure(const SimplexRealization& r);

    std::vector<double> upper() const;

    int m() const { return static_cast<int>(a_.rows()); }
    double operator()(int i, int j) const { return a_(i, j); }
    const Mat& matrix() const { return a_; }

    double ell() const;  // max off-diagonal length
    double s() const;    // min off-diagonal length

    EdgeTuple permuted(const std::vector<int>& perm) const;  // new(i,j) = old(perm[i], perm[j])
    EdgeTuple sub(const std::vector<int>& idx) const;

private:
    Mat a_;
};

// Number of points m with m(m-1)/2 == count, or -1.
int points_for_edge_count(std::size_t count);

} // namespace ffm

#endif
