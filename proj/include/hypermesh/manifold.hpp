#pragma once

#include <span>

#include "hypermesh/array.hpp"

namespace hypermesh {

/// Curvature of the Poincare ball. The paper convention is c < 0; every
/// formula here is written in kappa = -c > 0. Ball radius is 1/sqrt(kappa).
struct Curvature {
    double c = -1.0;

    Curvature() = default;
    explicit Curvature(double c_);
    double kappa() const { return -c; }
    double sqrt_kappa() const;
    double ball_radius() const { return 1.0 / sqrt_kappa(); }
    bool operator==(const Curvature& o) const { return c == o.c; }
};

// Numerical guards. Rows are clamped to radius (1 - BALL_EPS)/sqrt(kappa);
// artanh arguments are clamped to 1 - ARTANH_EPS. MIN_NORM avoids 0/0 in the
// v/||v|| pattern (exact at v = 0 because the numerator is zero).
inline constexpr double BALL_EPS = 1e-5;
inline constexpr double ARTANH_EPS = 1e-7;
inline constexpr double MIN_NORM = 1e-15;

/// A batch of points constrained to the open ball. Construct via project_to_ball
/// (or from parts already known to satisfy the invariant).
struct BallTensor {
    Array data;
    Curvature curv;

    int rows() const { return data.rows; }
    int cols() const { return data.cols; }
    /// Throws unless every row satisfies kappa*||x||^2 <= (1 - 1e-5)^2 and is finite.
    void validate() const;
};

/// Tangent vectors at a stated base point (origin unless said otherwise).
using TangentTensor = Array;

enum class Nonlinearity { ReLU };

double artanh(double x);  // input clamped to +-(1 - ARTANH_EPS)

// Row kernels. Batch entry points below parallelize over rows; each has a
// *_serial sibling running the identical kernel on one thread.
namespace rowk {
void clamp_to_ball(std::span<double> x, double kappa);
void mobius_add(std::span<const double> x, std::span<const double> y, double kappa, std::span<double> out);
void exp_origin(std::span<const double> v, double kappa, std::span<double> out);
void log_origin(std::span<const double> y, double kappa, std::span<double> out);
void exp_at(std::span<const double> base, std::span<const double> v, double kappa, std::span<double> out);
void log_at(std::span<const double> base, std::span<const double> y, double kappa, std::span<double> out);
double geodesic(std::span<const double> x, std::span<const double> y, double kappa);
void to_klein(std::span<const double> x, double kappa, std::span<double> out);
void from_klein(std::span<const double> k, double kappa, std::span<double> out);
/// Monotone surrogate of geodesic distance: 2*kappa*||x-y||^2 / ((1-kappa||x||^2)(1-kappa||y||^2)).
/// d = arcosh(1 + key)/sqrt(kappa); used as the k-NN sort key.
double geodesic_sort_key(std::span<const double> x, std::span<const double> y, double kappa,
                         double sumsq_x, double sumsq_y);
}  // namespace rowk

BallTensor project_to_ball(const Array& x, Curvature curv);
BallTensor project_to_ball_serial(const Array& x, Curvature curv);

/// lambda_x = 2/(1 - kappa*||x||^2) per row; domain error on/outside the boundary.
Array conformal_factor(const BallTensor& x);

BallTensor mobius_add(const BallTensor& x, const BallTensor& y);
BallTensor mobius_add_serial(const BallTensor& x, const BallTensor& y);
BallTensor mobius_neg(const BallTensor& x);

BallTensor exp_map_origin(const TangentTensor& v, Curvature curv);
BallTensor exp_map_origin_serial(const TangentTensor& v, Curvature curv);
TangentTensor log_map_origin(const BallTensor& y);
TangentTensor log_map_origin_serial(const BallTensor& y);
BallTensor exp_map(const BallTensor& base, const TangentTensor& v);
TangentTensor log_map(const BallTensor& base, const BallTensor& y);

/// Rowwise distance between paired rows of x and y.
Array geodesic_distance(const BallTensor& x, const BallTensor& y);
/// Full n x m distance matrix.
Array pairwise_geodesic(const BallTensor& a, const BallTensor& b);
Array pairwise_geodesic_serial(const BallTensor& a, const BallTensor& b);

/// M (d_out x d_in) acting on each row of x.
BallTensor mobius_matvec(const Array& m, const BallTensor& x);
BallTensor mobius_matvec_serial(const Array& m, const BallTensor& x);

Array to_klein(const BallTensor& x);
BallTensor from_klein(const Array& k, Curvature curv);

/// Lorentz-factor-weighted Klein mean of all rows, converted back to the ball.
/// Summation is left-to-right in row order.
BallTensor einstein_midpoint(const BallTensor& points);

BallTensor hyperbolic_activation(const BallTensor& x, Nonlinearity nl = Nonlinearity::ReLU);

void require_same_curvature(const BallTensor& a, const BallTensor& b, const char* what);

}  // namespace hypermesh
