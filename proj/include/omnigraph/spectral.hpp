#pragma once

#include <span>
#include <vector>

#include "omnigraph/graph.hpp"

namespace omnigraph {

/// Polynomial graph filter sum_m coeffs[m] * L_s^m with L_s = L / lambda_max.
struct PolyFilter {
    std::vector<double> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    /// f(lambda) = sum_m coeffs[m] * lambda^m
    double response(double lambda) const;
};

/// Vertex-domain filtering by M sparse matvecs against L / lambda_max.
/// Throws DimensionMismatch when y does not match the graph.
std::vector<double> apply_poly_filter(const SparseLaplacian& l, const PolyFilter& f, std::span<const double> y);
std::vector<double> apply_poly_filter_serial(const SparseLaplacian& l, const PolyFilter& f,
                                             std::span<const double> y);

/// powers[m] = L_s^m y for m = 0..max_power.
std::vector<std::vector<double>> laplacian_powers(const SparseLaplacian& l, std::span<const double> y,
                                                  int max_power);

inline constexpr std::size_t kMaxDenseNodes = 2000;

/// Eigenpairs of a Laplacian, eigenvalues ascending.
struct SpectralDecomposition {
    std::size_t n = 0;
    std::vector<double> eigenvalues;
    std::vector<double> eigenvectors;  // column l = eigenvectors[i * n + l]
    double lambda_max = 1.0;           // scale used by the filters, taken from the Laplacian

    double vector(std::size_t node, std::size_t l) const { return eigenvectors[node * n + l]; }
};

/// Dense symmetric eigendecomposition; throws SizeLimit above kMaxDenseNodes.
SpectralDecomposition decompose(const SparseLaplacian& l);

/// Filtering in the graph Fourier domain:
/// out(i) = sum_l f(lambda_l / lambda_max) <y, u_l> u_l(i).
std::vector<double> spectral_reference(const SpectralDecomposition& dec, const PolyFilter& f,
                                       std::span<const double> y);

}  // namespace omnigraph
