#include "ffm/edge_tuple.hpp"
#include "ffm/errors.hpp"

#include <cmath>
#include <limits>

namespace ffm {

EdgeTuple::EdgeTuple(Mat lengths) : a_(std::move(lengths)) {
    if (a_.rows() != a_.cols()) throw InvalidInput("edge matrix must be square");
    if (a_.rows() < 2) throw InvalidInput("edge tuple needs at least two points");
    for (int i = 0; i < a_.rows(); ++i) {
        if (a_(i, i) != 0.0) throw InvalidInput("edge matrix diagonal must be zero");
        for (int j = i + 1; j < a_.cols(); ++j) {
            if (!(a_(i, j) > 0.0) || !std::isfinite(a_(i, j)))
                throw InvalidInput("edge lengths must be positive and finite");
            if (std::abs(a_(i, j) - a_(j, i)) > 1e-12 * a_(i, j))
                throw InvalidInput("edge matrix must be symmetric");
            a_(j, i) = a_(i, j);
        }
    }
}

EdgeTuple EdgeTuple::from_upper(const std::vector<double>& upper, int m) {
    if (m < 2 || upper.size() != static_cast<std::size_t>(m * (m - 1) / 2))
        throw InvalidInput("upper-triangle length list does not match point count");
    Mat a = Mat::Zero(m, m);
    std::size_t k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) a(i, j) = a(j, i) = upper[k++];
    return EdgeTuple(std::move(a));
}

EdgeTuple EdgeTuple::measure(const SimplexRealization& r) { return EdgeTuple(r.distances()); }

std::vector<double> EdgeTuple::upper() const {
    std::vector<double> out;
    out.reserve(m() * (m() - 1) / 2);
    for (int i = 0; i < m(); ++i)
        for (int j = i + 1; j < m(); ++j) out.push_back(a_(i, j));
    return out;
}

double EdgeTuple::ell() const {
    double v = 0.0;
    for (int i = 0; i < m(); ++i)
        for (int j = i + 1; j < m(); ++j) v = std::max(v, a_(i, j));
    return v;
}

double EdgeTuple::s() const {
    double v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m(); ++i)
        for (int j = i + 1; j < m(); ++j) v = std::min(v, a_(i, j));
    return v;
}

EdgeTuple EdgeTuple::permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != m()) throw InvalidInput("permutation size mismatch");
    Mat b(m(), m());
    for (int i = 0; i < m(); ++i)
        for (int j = 0; j < m(); ++j) b(i, j) = a_(perm[i], perm[j]);
    return EdgeTuple(std::move(b));
}

EdgeTuple EdgeTuple::sub(const std::vector<int>& idx) const {
    const int n = static_cast<int>(idx.size());
    Mat b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = a_(idx[i], idx[j]);
    return EdgeTuple(std::move(b));
}

int points_for_edge_count(std::size_t count) {
    for (int m = 2; m < 64; ++m) {
        const std::size_t e = static_cast<std::size_t>(m) * (m - 1) / 2;
        if (e == count) return m;
        if (e > count) break;
    }
    return -1;
}

} // namespace ffm
