#include "omnigraph/spectral.hpp"

#include <Eigen/Dense>
#include <string>

#include "omnigraph/error.hpp"

namespace omnigraph {

double PolyFilter::response(double lambda) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * lambda + *it;
    return acc;
}

namespace {

void check_length(const SparseLaplacian& l, std::span<const double> y) {
    if (y.size() != l.size()) {
        throw DimensionMismatch("signal has " + std::to_string(y.size()) + " entries, graph has " +
                                std::to_string(l.size()) + " nodes");
    }
}

}  // namespace

std::vector<double> apply_poly_filter(const SparseLaplacian& l, const PolyFilter& f, std::span<const double> y) {
    check_length(l, y);
    std::vector<double> out(y.size());
    kernels::poly_apply(l.csr(), 1.0 / l.lambda_max(), f.coeffs, y, out);
    return out;
}

std::vector<double> apply_poly_filter_serial(const SparseLaplacian& l, const PolyFilter& f,
                                             std::span<const double> y) {
    check_length(l, y);
    std::vector<double> out(y.size());
    kernels::poly_apply_serial(l.csr(), 1.0 / l.lambda_max(), f.coeffs, y, out);
    return out;
}

std::vector<std::vector<double>> laplacian_powers(const SparseLaplacian& l, std::span<const double> y,
                                                  int max_power) {
    check_length(l, y);
    std::vector<std::vector<double>> powers;
    powers.reserve(static_cast<std::size_t>(max_power) + 1);
    powers.emplace_back(y.begin(), y.end());
    const double scale = 1.0 / l.lambda_max();
    for (int m = 1; m <= max_power; ++m) {
        std::vector<double> next(y.size());
        kernels::spmv(l.csr(), powers.back(), next, scale);
        powers.push_back(std::move(next));
    }
    return powers;
}

SpectralDecomposition decompose(const SparseLaplacian& l) {
    const std::size_t n = l.size();
    if (n > kMaxDenseNodes) {
        throw SizeLimit("dense eigendecomposition limited to " + std::to_string(kMaxDenseNodes) + " nodes, got " +
                        std::to_string(n));
    }
    const auto d = l.dense();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = d[i * n + j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition did not converge");

    SpectralDecomposition dec;
    dec.n = n;
    dec.lambda_max = l.lambda_max();
    dec.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    dec.eigenvectors.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) dec.eigenvectors[i * n + k] = solver.eigenvectors()(i, k);
    }
    return dec;
}

std::vector<double> spectral_reference(const SpectralDecomposition& dec, const PolyFilter& f,
                                       std::span<const double> y) {
    if (y.size() != dec.n) throw DimensionMismatch("signal length does not match decomposition");
    std::vector<double> out(dec.n, 0.0);
    for (std::size_t l = 0; l < dec.n; ++l) {
        double coeff = 0.0;
        for (std::size_t i = 0; i < dec.n; ++i) coeff += y[i] * dec.vector(i, l);
        coeff *= f.response(dec.eigenvalues[l] / dec.lambda_max);
        for (std::size_t i = 0; i < dec.n; ++i) out[i] += coeff * dec.vector(i, l);
    }
    return out;
}

}  // namespace omnigraph
