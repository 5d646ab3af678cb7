#include "omnigraph/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>

namespace omnigraph {

void CsrMatrix::finalize() {
    bandwidth = 0;
    bool fits = true;
    for (std::size_t i = 0; i < n; ++i) {
        fits = fits && row_ptr[i + 1] - row_ptr[i] <= kEllWidth && row_ptr[i + 1] > row_ptr[i];
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const std::size_t j = cols[k];
            bandwidth = std::max(bandwidth, i > j ? i - j : j - i);
        }
    }
    ell_cols.clear();
    ell_vals.clear();
    if (!fits) return;
    ell_cols.resize(n * kEllWidth);
    ell_vals.assign(n * kEllWidth, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < kEllWidth; ++k) {
            const std::size_t src = row_ptr[i] + k;
            const bool real = src < row_ptr[i + 1];
            ell_cols[i * kEllWidth + k] = real ? cols[src] : cols[row_ptr[i]];
            if (real) ell_vals[i * kEllWidth + k] = vals[src];
        }
    }
}

namespace kernels {
namespace {

// Below this many rows the fork/join overhead dominates.
constexpr std::size_t kParallelRows = 4096;

inline double ell_row_product(const CsrMatrix& a, std::size_t i, std::span<const double> x) {
    const std::uint32_t* c = &a.ell_cols[i * kEllWidth];
    const double* v = &a.ell_vals[i * kEllWidth];
    return 0.0 + v[0] * x[c[0]] + v[1] * x[c[1]] + v[2] * x[c[2]] + v[3] * x[c[3]] + v[4] * x[c[4]];
}

inline double row_product(const CsrMatrix& a, std::size_t i, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.vals[k] * x[a.cols[k]];
    return s;
}

template <typename Spmv>
void poly_apply_impl(const CsrMatrix& a, double scale, std::span<const double> coeffs, std::span<const double> x,
                     std::span<double> out, Spmv&& mv) {
    std::fill(out.begin(), out.end(), 0.0);
    if (coeffs.empty()) return;
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next(x.size());
    axpy(coeffs[0], cur, out);
    for (std::size_t m = 1; m < coeffs.size(); ++m) {
        mv(a, cur, next, scale);
        std::swap(cur, next);
        axpy(coeffs[m], cur, out);
    }
}

}  // namespace

void spmv_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale) {
    for (std::size_t i = 0; i < a.n; ++i) y[i] = scale * row_product(a, i, x);
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale) {
    std::size_t lo = 0;
    std::size_t hi = a.n;
    if (a.bandwidth < a.n) {
        while (lo < a.n && x[lo] == 0.0) ++lo;
        while (hi > lo && x[hi - 1] == 0.0) --hi;
        lo = lo > a.bandwidth ? lo - a.bandwidth : 0;
        hi = hi == 0 ? 0 : std::min(a.n, hi + a.bandwidth);
        if (hi < lo) hi = lo;
        std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(lo), scale * 0.0);
        std::fill(y.begin() + static_cast<std::ptrdiff_t>(hi), y.begin() + static_cast<std::ptrdiff_t>(a.n),
                  scale * 0.0);
    }
    const auto first = static_cast<std::ptrdiff_t>(lo);
    const auto last = static_cast<std::ptrdiff_t>(hi);
    if (a.ell_vals.size() == a.n * kEllWidth && a.n > 0) {
#pragma omp parallel for schedule(static) if (hi - lo >= kParallelRows)
        for (std::ptrdiff_t i = first; i < last; ++i) {
            y[i] = scale * ell_row_product(a, static_cast<std::size_t>(i), x);
        }
        return;
    }
#pragma omp parallel for schedule(static) if (hi - lo >= kParallelRows)
    for (std::ptrdiff_t i = first; i < last; ++i) y[i] = scale * row_product(a, static_cast<std::size_t>(i), x);
}

void spmv_rows_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale,
                      std::span<const std::uint32_t> rows) {
    for (auto i : rows) y[i] = scale * row_product(a, i, x);
}

void spmv_rows(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale,
               std::span<const std::uint32_t> rows) {
    const auto count = static_cast<std::ptrdiff_t>(rows.size());
    if (a.ell_vals.size() == a.n * kEllWidth && a.n > 0) {
#pragma omp parallel for schedule(static) if (rows.size() >= kParallelRows)
        for (std::ptrdiff_t r = 0; r < count; ++r) y[rows[r]] = scale * ell_row_product(a, rows[r], x);
        return;
    }
#pragma omp parallel for schedule(static) if (rows.size() >= kParallelRows)
    for (std::ptrdiff_t r = 0; r < count; ++r) y[rows[r]] = scale * row_product(a, rows[r], x);
}

void neighbourhood(const CsrMatrix& a, std::span<const std::uint32_t> rows, std::vector<std::uint32_t>& out,
                   std::vector<std::uint8_t>& mark) {
    out.clear();
    if (rows.empty()) return;
    std::size_t lo = 0;
    std::size_t hi = a.n;
    if (a.bandwidth < a.n) {
        lo = rows.front() > a.bandwidth ? rows.front() - a.bandwidth : 0;
        hi = std::min(a.n, std::size_t{rows.back()} + a.bandwidth + 1);
    }
    if (a.ell_vals.size() == a.n * kEllWidth && a.n > 0) {
        for (auto i : rows) {
            const std::uint32_t* c = &a.ell_cols[std::size_t{i} * kEllWidth];
            mark[i] = 1;
            for (std::size_t k = 0; k < kEllWidth; ++k) mark[c[k]] = 1;
        }
    } else {
        for (auto i : rows) {
            mark[i] = 1;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) mark[a.cols[k]] = 1;
        }
    }
    // branch-free collection: write every index, advance on marked ones
    out.resize(hi - lo + 1);
    std::size_t count = 0;
    for (std::size_t j = lo; j < hi; ++j) {
        out[count] = static_cast<std::uint32_t>(j);
        count += mark[j];
        mark[j] = 0;
    }
    out.resize(count);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void poly_apply_serial(const CsrMatrix& a, double scale, std::span<const double> coeffs, std::span<const double> x,
                       std::span<double> out) {
    poly_apply_impl(a, scale, coeffs, x, out, spmv_serial);
}

void poly_apply(const CsrMatrix& a, double scale, std::span<const double> coeffs, std::span<const double> x,
                std::span<double> out) {
    poly_apply_impl(a, scale, coeffs, x, out, spmv);
}

}  // namespace kernels
}  // namespace omnigraph
