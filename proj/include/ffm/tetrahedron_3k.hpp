#ifndef FFM_TETRAHEDRON_3K_HPP
#define FFM_TETRAHEDRON_3K_HPP

#include "ffm/edge_tuple.hpp"
#include "ffm/fermat.hpp"

#include <vector>

namespace ffm {

// Conventions: the EdgeTuple holds A_1..A_4 as indices 0..3. A_0 is fixed by
// its distances a01, a02 to A_1, A_2 and by the dihedral angle alpha between
// the planes (A_1 A_2 A_3) and (A_1 A_2 A_0), measured towards A_4.
// alpha_ijk is the angle at A_j in triangle A_i A_j A_k.

struct TetraAngles {
    double alpha123 = 0.0;
    double alpha124 = 0.0;
    double alpha324 = 0.0;
    double alpha_g4 = 0.0;  // dihedral between (A_1 A_2 A_3) and (A_1 A_2 A_4)
};

// Quantities attached to A_0. Feet: A_{0,12} on line A_1A_2, A_{0,123} on plane A_1A_2A_3.
struct TetraPoint {
    double h012 = 0.0;   // |A_0 A_{0,12}|
    double l = 0.0;      // signed |A_2 A_{0,12}|, positive towards A_1
    double d = 0.0;      // |A_{0,12} A_{0,123}|
    double h0123 = 0.0;  // |A_0 A_{0,123}|
    double beta = 0.0;   // angle A_1 A_2 A_{0,123}
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;  // |A_i A_{0,123}|
};

TetraAngles tetra_angles(const EdgeTuple& edges, double K);

// Altitude from A_0 onto A_1A_2 in triangle A_0A_1A_2.
double h012(double a01, double a02, double a12, double K);

TetraPoint tetra_point(double a01, double a02, double alpha, const EdgeTuple& edges, double K);

double a03_of(double a01, double a02, double alpha, const EdgeTuple& edges, double K);
double a04_of(double a01, double a02, double alpha, const EdgeTuple& edges, double K);

// alpha recovered from a03; throws Infeasible when no real angle exists.
double solve_alpha(double a01, double a02, double a03, const EdgeTuple& edges, double K);
double eliminate_alpha(double a01, double a02, double a03, const EdgeTuple& edges, double K);

// Flat closed forms, with alpha_g4 from the closed form on the A_4 side.
struct FlatA03A04 {
    double a03 = 0.0;
    double a04 = 0.0;
};
FlatA03A04 euclidean_a03_a04(double a01, double a02, double alpha, const EdgeTuple& edges);
double dihedral_g4_flat(const EdgeTuple& edges);

struct TetraConditions {
    double first_order = 0.0;      // max subtracted cosine-law violation
    bool volumes_checked = false;  // volume-ratio part is flat only
    bool degenerate = false;       // A_0 on a face
    double C = 0.0;                // (sum B_i / a_0i) / Vol(A_1..A_4)
    std::vector<double> tetraed;   // |(B_i/(a_0i Vol_i))^2 - C^2| / C^2
    std::vector<double> sub_volumes;  // Vol_i: A_i replaced by A_0
    double comparison_volume = 0.0;   // regular tetrahedron with the maximal edge
    bool volume_inequality = false;   // every Vol(A_0, A_i, A_j, A_k) below the comparison volume
    double max_tetraed() const;
};

TetraConditions tetra_multitree_conditions(const FermatTree& tree, const EdgeTuple& edges, const Weights& w, double K);

} // namespace ffm

#endif
