#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hypermesh {

/// Dense row-major matrix of doubles. Rows are points/features, cols are dims.
struct Array {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Array() = default;
    Array(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}
    Array(int r, int c, std::vector<double> data);

    double& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }

    std::span<double> row(int i) { return {v.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row(int i) const {
        return {v.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)};
    }

    size_t size() const { return v.size(); }
    bool same_shape(const Array& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;
    /// Index of the first row containing a NaN/Inf entry, or -1 if none.
    int first_nonfinite_row() const;

    static Array from_row(std::span<const double> r);
};

// Plain dense kernels, used by the forward reference path and by tape backward rules.
Array matmul(const Array& a, const Array& b);     // (n,k)x(k,m) -> (n,m)
Array matmul_nt(const Array& a, const Array& b);  // (n,k)x(m,k) -> (n,m), a * b^T
Array matmul_tn(const Array& a, const Array& b);  // (k,n)x(k,m) -> (n,m), a^T * b
Array transpose(const Array& a);

void require_same_shape(const Array& a, const Array& b, const char* what);

double dot(std::span<const double> a, std::span<const double> b);
double sumsq(std::span<const double> a);
double norm2(std::span<const double> a);

std::string shape_str(const Array& a);

}  // namespace hypermesh
