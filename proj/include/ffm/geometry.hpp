#ifndef FFM_GEOMETRY_HPP
#define FFM_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace ffm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Space form of curvature K and dimension N.
//   K = 0: points in R^N
//   K > 0: points x in R^{N+1} with |x|^2 = 1/K and x[0] > 0 (open hemisphere)
//   K < 0: points x in R^{N+1} with <x,x>_L = 1/K and x[0] > 0, where
//          <x,y>_L = -x0*y0 + x1*y1 + ... (upper sheet of the hyperboloid)
struct CurvedSpace {
    double K = 0.0;
    int N = 2;

    CurvedSpace() = default;
    CurvedSpace(double curvature, int dim);

    double kappa() const;
    int ambient_dim() const { return K == 0.0 ? N : N + 1; }
    bool flat() const { return K == 0.0; }
    bool spherical() const { return K > 0.0; }
    bool hyperbolic() const { return K < 0.0; }
};

// Ambient bilinear form of the model: Euclidean for K >= 0, Lorentzian for K < 0.
double model_inner(const Vec& x, const Vec& y, const CurvedSpace& sp);

// cos(kx)/cosh(kx) and sin(kx)/sinh(kx). Unscaled, so the flat limit is (1, 0).
double cos_k(double x, const CurvedSpace& sp);
double sin_k(double x, const CurvedSpace& sp);

// Throws InvalidInput if p does not satisfy the model invariants.
void check_point(const Vec& p, const CurvedSpace& sp, double tol = 1e-9);
bool is_model_point(const Vec& p, const CurvedSpace& sp, double tol = 1e-9);

// Base point: origin, north pole (1/k, 0, ...) or hyperboloid apex.
Vec base_point(const CurvedSpace& sp);

// Nearest-ray projection of an ambient vector onto the model (radial for
// K > 0, time-rescaling for K < 0). Throws Infeasible when no model point
// lies on the ray.
Vec project_to_model(const Vec& x, const CurvedSpace& sp);

double geodesic_distance(const Vec& p, const Vec& q, const CurvedSpace& sp);

// Cosine of the angle between sides a and b, opposite side c.
// Clamped to [-1, 1] within 1e-9; further out throws Infeasible.
double cos_vertex_angle(double a, double b, double c, const CurvedSpace& sp);

// Inverse of the cosine law: opposite side from two sides and the cosine of
// the included angle.
double opposite_side(double a, double b, double cos_gamma, const CurvedSpace& sp);

// Tangent vector at p pointing to q with model norm equal to d(p, q).
// Returns zero when p == q.
Vec log_map(const Vec& p, const Vec& q, const CurvedSpace& sp);
Vec exp_map(const Vec& p, const Vec& v, const CurvedSpace& sp);

// Model norm of a tangent vector.
double tangent_norm(const Vec& v, const CurvedSpace& sp);

// Columns form an orthonormal basis (in the model metric) of T_p.
Mat tangent_basis(const Vec& p, const CurvedSpace& sp);

// Angle at p between the geodesics towards q and r.
double angle_at(const Vec& p, const Vec& q, const Vec& r, const CurvedSpace& sp);

struct SimplexRealization {
    CurvedSpace space;
    std::vector<Vec> vertices;

    int size() const { return static_cast<int>(vertices.size()); }
    Mat distances() const;
};

} // namespace ffm

#endif
