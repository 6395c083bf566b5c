#include "hypermesh/array.hpp"

#include <cmath>
#include <stdexcept>

namespace hypermesh {

Array::Array(int r, int c, std::vector<double> data) : rows(r), cols(c), v(std::move(data)) {
    if (v.size() != static_cast<size_t>(r) * c) {
        throw std::invalid_argument("Array: data size does not match " + std::to_string(r) + "x" +
                                    std::to_string(c));
    }
}

bool Array::all_finite() const { return first_nonfinite_row() < 0; }

int Array::first_nonfinite_row() const {
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (!std::isfinite(at(i, j))) return i;
        }
    }
    return -1;
}

Array Array::from_row(std::span<const double> r) {
    Array out(1, static_cast<int>(r.size()));
    for (size_t j = 0; j < r.size(); ++j) out.v[j] = r[j];
    return out;
}

Array matmul(const Array& a, const Array& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: " + shape_str(a) + " x " + shape_str(b));
    Array out(a.rows, b.cols, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* ai = a.v.data() + static_cast<size_t>(i) * a.cols;
        double* oi = out.v.data() + static_cast<size_t>(i) * b.cols;
        for (int k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.v.data() + static_cast<size_t>(k) * b.cols;
            for (int j = 0; j < b.cols; ++j) oi[j] += aik * bk[j];
        }
    }
    return out;
}

Array matmul_nt(const Array& a, const Array& b) {
    if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: " + shape_str(a) + " x " + shape_str(b));
    Array out(a.rows, b.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < b.rows; ++j) {
            out.at(i, j) = dot(a.row(i), b.row(j));
        }
    }
    return out;
}

Array matmul_tn(const Array& a, const Array& b) {
    if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: " + shape_str(a) + " x " + shape_str(b));
    Array out(a.cols, b.cols, 0.0);
    for (int k = 0; k < a.rows; ++k) {
        const double* ak = a.v.data() + static_cast<size_t>(k) * a.cols;
        const double* bk = b.v.data() + static_cast<size_t>(k) * b.cols;
        for (int i = 0; i < a.cols; ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* oi = out.v.data() + static_cast<size_t>(i) * b.cols;
            for (int j = 0; j < b.cols; ++j) oi[j] += aki * bk[j];
        }
    }
    return out;
}

Array transpose(const Array& a) {
    Array out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

void require_same_shape(const Array& a, const Array& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " +
                                    shape_str(b));
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

double sumsq(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(sumsq(a)); }

std::string shape_str(const Array& a) {
    return "(" + std::to_string(a.rows) + "," + std::to_string(a.cols) + ")";
}

}  // namespace hypermesh
