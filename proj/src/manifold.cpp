#include "hypermesh/manifold.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hypermesh/threading.hpp"

namespace hypermesh {

namespace {

template <typename F>
void rows_parallel(int n, F&& f) {
    if (parallel_worthwhile(n)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
        for (int i = 0; i < n; ++i) f(i);
    } else {
        for (int i = 0; i < n; ++i) f(i);
    }
}

template <typename F>
void rows_serial(int n, F&& f) {
    for (int i = 0; i < n; ++i) f(i);
}

void require_finite(const Array& x, const char* what) {
    const int bad = x.first_nonfinite_row();
    if (bad >= 0) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry in row " + std::to_string(bad));
    }
}

}  // namespace

Curvature::Curvature(double c_) : c(c_) {
    if (!(c < 0.0)) throw std::invalid_argument("Curvature: c must be strictly negative, got " + std::to_string(c_));
}

double Curvature::sqrt_kappa() const { return std::sqrt(-c); }

void BallTensor::validate() const {
    require_finite(data, "BallTensor");
    const double kappa = curv.kappa();
    const double max_sq = (1.0 - BALL_EPS) * (1.0 - BALL_EPS) / kappa;
    for (int i = 0; i < data.rows; ++i) {
        const double s = sumsq(data.row(i));
        if (s > max_sq * (1.0 + 1e-12)) {
            throw std::domain_error("BallTensor: row " + std::to_string(i) + " outside the clamped ball");
        }
    }
}

double artanh(double x) {
    const double lim = 1.0 - ARTANH_EPS;
    if (x > lim) x = lim;
    if (x < -lim) x = -lim;
    return std::atanh(x);
}

namespace rowk {

void clamp_to_ball(std::span<double> x, double kappa) {
    const double r = norm2(x) * std::sqrt(kappa);
    if (r >= 1.0 - BALL_EPS) {
        const double s = (1.0 - BALL_EPS) / r;
        for (double& e : x) e *= s;
    }
}

void mobius_add(std::span<const double> x, std::span<const double> y, double kappa, std::span<double> out) {
    const double xy = dot(x, y);
    const double nx = sumsq(x);
    const double ny = sumsq(y);
    const double common = 2.0 * kappa * xy + 1.0;  // 1 + 2k<x,y>
    const double a = common + kappa * ny;
    const double b = -kappa * nx + 1.0;
    const double den = common + kappa * kappa * nx * ny;
    const double inv = 1.0 / den;
    for (size_t j = 0; j < out.size(); ++j) out[j] = (a * x[j] + b * y[j]) * inv;
    clamp_to_ball(out, kappa);
}

void exp_origin(std::span<const double> v, double kappa, std::span<double> out) {
    const double sk = std::sqrt(kappa);
    const double r = std::max(norm2(v), MIN_NORM);
    const double f = std::tanh(sk * r) / (sk * r);
    for (size_t j = 0; j < out.size(); ++j) out[j] = f * v[j];
    clamp_to_ball(out, kappa);
}

void log_origin(std::span<const double> y, double kappa, std::span<double> out) {
    const double sk = std::sqrt(kappa);
    const double r = std::max(norm2(y), MIN_NORM);
    const double f = artanh(sk * r) / (sk * r);
    for (size_t j = 0; j < out.size(); ++j) out[j] = f * y[j];
}

void exp_at(std::span<const double> base, std::span<const double> v, double kappa, std::span<double> out) {
    const double sk = std::sqrt(kappa);
    const double lambda = 2.0 / (1.0 - kappa * sumsq(base));
    const double r = std::max(norm2(v), MIN_NORM);
    const double f = std::tanh(sk * lambda * r / 2.0) / (sk * r);
    std::vector<double> step(v.size());
    for (size_t j = 0; j < step.size(); ++j) step[j] = f * v[j];
    mobius_add(base, step, kappa, out);
}

void log_at(std::span<const double> base, std::span<const double> y, double kappa, std::span<double> out) {
    const double sk = std::sqrt(kappa);
    const double lambda = 2.0 / (1.0 - kappa * sumsq(base));
    std::vector<double> neg(base.size());
    for (size_t j = 0; j < neg.size(); ++j) neg[j] = -base[j];
    std::vector<double> u(base.size());
    mobius_add(neg, y, kappa, u);
    const double r = std::max(norm2(u), MIN_NORM);
    const double f = (2.0 / (sk * lambda)) * artanh(sk * r) / r;
    for (size_t j = 0; j < out.size(); ++j) out[j] = f * u[j];
}

double geodesic(std::span<const double> x, std::span<const double> y, double kappa) {
    const double sk = std::sqrt(kappa);
    std::vector<double> neg(x.size());
    for (size_t j = 0; j < neg.size(); ++j) neg[j] = -x[j];
    std::vector<double> u(x.size());
    mobius_add(neg, y, kappa, u);
    return (2.0 / sk) * artanh(sk * norm2(u));
}

void to_klein(std::span<const double> x, double kappa, std::span<double> out) {
    const double s = 2.0 / (1.0 + kappa * sumsq(x));
    for (size_t j = 0; j < out.size(); ++j) out[j] = s * x[j];
}

void from_klein(std::span<const double> k, double kappa, std::span<double> out) {
    const double t = 1.0 - kappa * sumsq(k);
    if (t <= 0.0) throw std::domain_error("from_klein: point on or outside the Klein ball");
    const double s = 1.0 / (1.0 + std::sqrt(t));
    for (size_t j = 0; j < out.size(); ++j) out[j] = s * k[j];
}

double geodesic_sort_key(std::span<const double> x, std::span<const double> y, double kappa,
                         double sumsq_x, double sumsq_y) {
    const double diff = std::max(sumsq_x + sumsq_y - 2.0 * dot(x, y), 0.0);
    return 2.0 * kappa * diff / ((1.0 - kappa * sumsq_x) * (1.0 - kappa * sumsq_y));
}

}  // namespace rowk

BallTensor project_to_ball(const Array& x, Curvature curv) {
    require_finite(x, "project_to_ball");
    BallTensor out{x, curv};
    const double kappa = curv.kappa();
    rows_parallel(out.data.rows, [&](int i) { rowk::clamp_to_ball(out.data.row(i), kappa); });
    return out;
}

BallTensor project_to_ball_serial(const Array& x, Curvature curv) {
    require_finite(x, "project_to_ball");
    BallTensor out{x, curv};
    const double kappa = curv.kappa();
    rows_serial(out.data.rows, [&](int i) { rowk::clamp_to_ball(out.data.row(i), kappa); });
    return out;
}

Array conformal_factor(const BallTensor& x) {
    const double kappa = x.curv.kappa();
    Array out(x.rows(), 1);
    for (int i = 0; i < x.rows(); ++i) {
        const double n = kappa * sumsq(x.data.row(i));
        if (n >= 1.0) {
            throw std::domain_error("conformal_factor: row " + std::to_string(i) + " on or outside the boundary");
        }
        out.at(i, 0) = 2.0 / (1.0 - n);
    }
    return out;
}

void require_same_curvature(const BallTensor& a, const BallTensor& b, const char* what) {
    if (!(a.curv == b.curv)) {
        throw std::invalid_argument(std::string(what) + ": curvature mismatch (" + std::to_string(a.curv.c) +
                                    " vs " + std::to_string(b.curv.c) + ")");
    }
}

BallTensor mobius_add(const BallTensor& x, const BallTensor& y) {
    require_same_curvature(x, y, "mobius_add");
    require_same_shape(x.data, y.data, "mobius_add");
    const double kappa = x.curv.kappa();
    BallTensor out{Array(x.rows(), x.cols()), x.curv};
    rows_parallel(x.rows(), [&](int i) { rowk::mobius_add(x.data.row(i), y.data.row(i), kappa, out.data.row(i)); });
    return out;
}

BallTensor mobius_add_serial(const BallTensor& x, const BallTensor& y) {
    require_same_curvature(x, y, "mobius_add");
    require_same_shape(x.data, y.data, "mobius_add");
    const double kappa = x.curv.kappa();
    BallTensor out{Array(x.rows(), x.cols()), x.curv};
    rows_serial(x.rows(), [&](int i) { rowk::mobius_add(x.data.row(i), y.data.row(i), kappa, out.data.row(i)); });
    return out;
}

BallTensor mobius_neg(const BallTensor& x) {
    BallTensor out = x;
    for (double& e : out.data.v) e = -e;
    return out;
}

BallTensor exp_map_origin(const TangentTensor& v, Curvature curv) {
    require_finite(v, "exp_map_origin");
    const double kappa = curv.kappa();
    BallTensor out{Array(v.rows, v.cols), curv};
    rows_parallel(v.rows, [&](int i) { rowk::exp_origin(v.row(i), kappa, out.data.row(i)); });
    return out;
}

BallTensor exp_map_origin_serial(const TangentTensor& v, Curvature curv) {
    require_finite(v, "exp_map_origin");
    const double kappa = curv.kappa();
    BallTensor out{Array(v.rows, v.cols), curv};
    rows_serial(v.rows, [&](int i) { rowk::exp_origin(v.row(i), kappa, out.data.row(i)); });
    return out;
}

TangentTensor log_map_origin(const BallTensor& y) {
    const double kappa = y.curv.kappa();
    Array out(y.rows(), y.cols());
    rows_parallel(y.rows(), [&](int i) { rowk::log_origin(y.data.row(i), kappa, out.row(i)); });
    return out;
}

TangentTensor log_map_origin_serial(const BallTensor& y) {
    const double kappa = y.curv.kappa();
    Array out(y.rows(), y.cols());
    rows_serial(y.rows(), [&](int i) { rowk::log_origin(y.data.row(i), kappa, out.row(i)); });
    return out;
}

BallTensor exp_map(const BallTensor& base, const TangentTensor& v) {
    require_finite(v, "exp_map");
    require_same_shape(base.data, v, "exp_map");
    const double kappa = base.curv.kappa();
    BallTensor out{Array(v.rows, v.cols), base.curv};
    rows_parallel(v.rows, [&](int i) { rowk::exp_at(base.data.row(i), v.row(i), kappa, out.data.row(i)); });
    return out;
}

TangentTensor log_map(const BallTensor& base, const BallTensor& y) {
    require_same_curvature(base, y, "log_map");
    require_same_shape(base.data, y.data, "log_map");
    const double kappa = base.curv.kappa();
    Array out(y.rows(), y.cols());
    rows_parallel(y.rows(), [&](int i) { rowk::log_at(base.data.row(i), y.data.row(i), kappa, out.row(i)); });
    return out;
}

Array geodesic_distance(const BallTensor& x, const BallTensor& y) {
    require_same_curvature(x, y, "geodesic_distance");
    require_same_shape(x.data, y.data, "geodesic_distance");
    const double kappa = x.curv.kappa();
    Array out(x.rows(), 1);
    rows_parallel(x.rows(), [&](int i) { out.at(i, 0) = rowk::geodesic(x.data.row(i), y.data.row(i), kappa); });
    return out;
}

Array pairwise_geodesic(const BallTensor& a, const BallTensor& b) {
    require_same_curvature(a, b, "pairwise_geodesic");
    if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_geodesic: dimension mismatch");
    const double kappa = a.curv.kappa();
    Array out(a.rows(), b.rows());
    rows_parallel(a.rows(), [&](int i) {
        for (int j = 0; j < b.rows(); ++j) out.at(i, j) = rowk::geodesic(a.data.row(i), b.data.row(j), kappa);
    });
    return out;
}

Array pairwise_geodesic_serial(const BallTensor& a, const BallTensor& b) {
    require_same_curvature(a, b, "pairwise_geodesic");
    if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_geodesic: dimension mismatch");
    const double kappa = a.curv.kappa();
    Array out(a.rows(), b.rows());
    rows_serial(a.rows(), [&](int i) {
        for (int j = 0; j < b.rows(); ++j) out.at(i, j) = rowk::geodesic(a.data.row(i), b.data.row(j), kappa);
    });
    return out;
}

namespace {

void matvec_row(const Array& y_all, const BallTensor& x, double kappa, int i, std::span<double> out) {
    const double sk = std::sqrt(kappa);
    std::span<const double> y = y_all.row(i);
    const double rx = std::max(norm2(x.data.row(i)), MIN_NORM);
    const double ry = std::max(norm2(y), MIN_NORM);
    const double f = std::tanh((ry / rx) * artanh(sk * rx)) / (sk * ry);
    for (size_t j = 0; j < out.size(); ++j) out[j] = f * y[j];
    rowk::clamp_to_ball(out, kappa);
}

}  // namespace

BallTensor mobius_matvec(const Array& m, const BallTensor& x) {
    if (m.cols != x.cols()) {
        throw std::invalid_argument("mobius_matvec: matrix " + shape_str(m) + " does not act on points of dim " +
                                    std::to_string(x.cols()));
    }
    const Array y = matmul_nt(x.data, m);  // rows times M^T
    const double kappa = x.curv.kappa();
    BallTensor out{Array(x.rows(), m.rows), x.curv};
    rows_parallel(x.rows(), [&](int i) { matvec_row(y, x, kappa, i, out.data.row(i)); });
    return out;
}

BallTensor mobius_matvec_serial(const Array& m, const BallTensor& x) {
    if (m.cols != x.cols()) {
        throw std::invalid_argument("mobius_matvec: matrix " + shape_str(m) + " does not act on points of dim " +
                                    std::to_string(x.cols()));
    }
    const Array y = matmul_nt(x.data, m);
    const double kappa = x.curv.kappa();
    BallTensor out{Array(x.rows(), m.rows), x.curv};
    rows_serial(x.rows(), [&](int i) { matvec_row(y, x, kappa, i, out.data.row(i)); });
    return out;
}

Array to_klein(const BallTensor& x) {
    const double kappa = x.curv.kappa();
    Array out(x.rows(), x.cols());
    rows_parallel(x.rows(), [&](int i) { rowk::to_klein(x.data.row(i), kappa, out.row(i)); });
    return out;
}

BallTensor from_klein(const Array& k, Curvature curv) {
    const double kappa = curv.kappa();
    // domain check up front so the parallel loop cannot throw
    for (int i = 0; i < k.rows; ++i) {
        if (kappa * sumsq(k.row(i)) >= 1.0) {
            throw std::domain_error("from_klein: row " + std::to_string(i) + " on or outside the Klein ball");
        }
    }
    BallTensor out{Array(k.rows, k.cols), curv};
    rows_parallel(k.rows, [&](int i) { rowk::from_klein(k.row(i), kappa, out.data.row(i)); });
    return out;
}

BallTensor einstein_midpoint(const BallTensor& points) {
    if (points.rows() < 1) throw std::invalid_argument("einstein_midpoint: empty input set");
    const double kappa = points.curv.kappa();
    const int d = points.cols();
    const Array klein = to_klein(points);
    std::vector<double> acc(d, 0.0);
    double gsum = 0.0;
    for (int i = 0; i < klein.rows; ++i) {
        const double t = 1.0 - kappa * sumsq(klein.row(i));
        const double gamma = 1.0 / std::sqrt(std::max(t, 1e-300));
        for (int j = 0; j < d; ++j) acc[j] += gamma * klein.at(i, j);
        gsum += gamma;
    }
    Array mid(1, d);
    const double inv = 1.0 / gsum;
    for (int j = 0; j < d; ++j) mid.at(0, j) = acc[j] * inv;
    BallTensor out{Array(1, d), points.curv};
    rowk::from_klein(mid.row(0), kappa, out.data.row(0));
    rowk::clamp_to_ball(out.data.row(0), kappa);
    return out;
}

BallTensor hyperbolic_activation(const BallTensor& x, Nonlinearity nl) {
    (void)nl;  // single nonlinearity for now
    const double kappa = x.curv.kappa();
    BallTensor out{Array(x.rows(), x.cols()), x.curv};
    rows_parallel(x.rows(), [&](int i) {
        std::vector<double> t(x.cols());
        rowk::log_origin(x.data.row(i), kappa, t);
        for (double& e : t) e = e > 0.0 ? e : 0.0;
        rowk::exp_origin(t, kappa, out.data.row(i));
    });
    return out;
}

}  // namespace hypermesh
