#ifndef FFM_INVERSE_INFINITY_HPP
#define FFM_INVERSE_INFINITY_HPP

#include "ffm/fermat.hpp"
#include "ffm/tetrahedron_3k.hpp"

#include <array>

namespace ffm {

// Planar weighted Fermat point of A_1A_2A_3 (indices 0..2 of the weights).
// phi is the angle A_{0,123} A_1 A_3, branches[i] = |A_{0,123} A_{i+1}|.
struct PlanarFermatSolution {
    double phi = 0.0;
    std::array<double, 3> branches{};
};

// angle213 is the angle at A_1. Throws Infeasible for weights outside the
// floating range.
PlanarFermatSolution planar_fermat_phi(double a12, double a13, double angle213, const Weights& w3);

struct InverseResult {
    Weights weights;
    double conditioning = 0.0;  // min/max of the unnormalized weights
    double balance = 0.0;       // |sum B_i u_i| / sum B_i at A_0
};

// Weights (summing to Csum) for which A_0 is the weighted Fermat point.
// Tetrahedra use Gram determinants of the angle cosines at A_0, triangles
// the sines of the opposite angles at A_0, other sizes the null space of the
// unit tangent vectors. Throws Infeasible when A_0 lies on a face or outside.
InverseResult inverse_weights_tetrahedron(const Vec& A0, const SimplexRealization& r, double Csum);
InverseResult inverse_weights_triangle(const Vec& A0, const SimplexRealization& r, double Csum);
InverseResult inverse_weights(const Vec& A0, const SimplexRealization& r, double Csum);

// A_1A_2A_3 in R^3 with weights B_i(M) = b_i M + c_i and B_4 = 1 at A_4,
// which sits at height M above the planar weighted Fermat point A_{0,123}.
struct InfinityFamily {
    double a12 = 1.0, a13 = 1.0, a23 = 1.0;
    std::array<double, 3> b{};
    std::array<double, 3> c{1.0, 1.0, 1.0};
    double M = 1e6;  // evaluation point for positivity and the limit

    Weights triangle_weights(double m) const;  // B_1(m), B_2(m), B_3(m); throws if not positive
    Weights weights(double m) const;           // with B_4 = 1
    double diameter() const;
};

struct InfinityDistances {
    PlanarFermatSolution planar;
    std::array<double, 3> a4{};  // a_41, a_42, a_43
    double alpha_g4 = 0.0;
    double h412 = 0.0;
};

InfinityDistances infinity_distances(const InfinityFamily& fam, double M);

// Coordinates: A_1 at the origin, A_3 on the x axis, A_2 in the upper half
// of the xy plane, A_4 above A_{0,123}.
SimplexRealization infinity_tetrahedron(const InfinityFamily& fam, double M);
Vec planar_fermat_point(const InfinityFamily& fam, double M);

struct InfinityTree {
    FermatTree tree;
    Vec foot;                     // A_{0,123}
    double foot_distance = 0.0;   // |A_0 A_{0,123}|
    TetraConditions conditions;
};

InfinityTree solve_infinity_tree(const InfinityFamily& fam, double M, const SolverOptions& opts = {});

// Triangle inverse weights at A_{0,123} summing to C - 1, C = 1 + sum B_i(M),
// followed by B_4 = 1. With require_balanced the family must have
// b_1 + b_2 + b_3 = 0, and then C = 1 + c_1 + c_2 + c_3.
Weights infinity_limit_inverse(const InfinityFamily& fam, bool require_balanced = true);

} // namespace ffm

#endif
