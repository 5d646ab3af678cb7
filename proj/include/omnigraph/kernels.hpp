#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace omnigraph {

/// Compressed sparse rows of a square matrix.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // n + 1 entries
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    // Upper bound on |i - j| over stored entries. spmv skips rows that cannot
    // reach the nonzero range of x; the default bound disables the skipping.
    std::size_t bandwidth = static_cast<std::size_t>(-1);
    // Fixed-width copy (kEllWidth slots per row) used by spmv when every row
    // fits. Short rows are padded with zeros on their own first column.
    std::vector<std::uint32_t> ell_cols;
    std::vector<double> ell_vals;

    std::size_t nnz() const { return vals.size(); }
    /// Recomputes `bandwidth` and the fixed-width copy. Call after changing
    /// the pattern or the values.
    void finalize();
};

inline constexpr std::size_t kEllWidth = 5;

namespace kernels {

// Every kernel comes in a plain loop version (`*_serial`) kept as the
// reference, and an OpenMP version with identical per-element arithmetic so
// the two agree bit for bit.

/// y = scale * A x. The OpenMP version only evaluates rows within
/// `bandwidth` of the nonzero range of x and writes scale * 0 elsewhere,
/// which is exactly what the full product gives there. It uses the
/// fixed-width copy when present; for finite x both paths add the same terms
/// in the same order.
void spmv_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale = 1.0);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale = 1.0);

/// y_i = scale * (A x)_i for every i in `rows`; other entries of y are left
/// alone. Each entry is computed exactly as spmv computes it.
void spmv_rows_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale,
                      std::span<const std::uint32_t> rows);
void spmv_rows(const CsrMatrix& a, std::span<const double> x, std::span<double> y, double scale,
               std::span<const std::uint32_t> rows);

/// Sorted union of `rows` (sorted) and every column stored in those rows. For a
/// structurally symmetric A with x zero outside `rows`, A x is zero outside
/// the result. `mark` is scratch: n entries, all zero on entry and on exit.
void neighbourhood(const CsrMatrix& a, std::span<const std::uint32_t> rows, std::vector<std::uint32_t>& out,
                   std::vector<std::uint8_t>& mark);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

/// out = sum_m coeffs[m] * (scale * A)^m x, evaluated with M matvecs.
void poly_apply_serial(const CsrMatrix& a, double scale, std::span<const double> coeffs, std::span<const double> x,
                       std::span<double> out);
void poly_apply(const CsrMatrix& a, double scale, std::span<const double> coeffs, std::span<const double> x,
                std::span<double> out);

}  // namespace kernels
}  // namespace omnigraph
