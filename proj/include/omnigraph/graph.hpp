#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "omnigraph/equirect.hpp"
#include "omnigraph/kernels.hpp"

namespace omnigraph {

enum class GraphMode {
    geometry,  // w = min(1 / chord distance, w_max)
    grid,      // w = 1
};

std::string_view to_string(GraphMode mode);
GraphMode parse_graph_mode(std::string_view s);

struct Edge {
    std::uint32_t i;
    std::uint32_t j;  // i < j
    double w;
};

/// 4-neighbour graph over an equirectangular grid. Columns wrap around in
/// theta; the top and bottom rows have no neighbour beyond the pole.
struct SphereGraph {
    EquirectGrid grid;
    GraphMode mode;
    double w_max;
    std::vector<Edge> edges;
};

/// 10x the weight of a horizontal equator edge, the cap on geometry weights.
double default_weight_cap(const EquirectGrid& grid);

/// Throws DegenerateEdge when the two points coincide.
double edge_weight(GraphMode mode, const SphericalPoint& a, const SphericalPoint& b, double w_max);

/// Edges in row-major node order; per node the right neighbour, then the one
/// in the next row.
SphereGraph build_graph(const EquirectGrid& grid, GraphMode mode);

/// Writes "i,j,w" rows after a header line.
void write_edges_csv(const std::filesystem::path& path, const SphereGraph& g);

/// Non-normalized Laplacian L = D - A in CSR form with a cached estimate of
/// its largest eigenvalue.
class SparseLaplacian {
public:
    /// Rows list the diagonal first, then neighbours in ascending column
    /// order. lambda_max comes from estimate_lambda_max unless given.
    static SparseLaplacian from_edges(std::size_t n, std::span<const Edge> edges,
                                      std::optional<double> lambda_max = std::nullopt);

    std::size_t size() const { return csr_.n; }
    const CsrMatrix& csr() const { return csr_; }
    double lambda_max() const { return lambda_max_; }

    /// L / lambda_max, whose own lambda_max is exactly 1.
    SparseLaplacian scaled() const;

    /// y = L x
    void apply(std::span<const double> x, std::span<double> y) const;

    /// Row-major dense copy; for tests and small graphs.
    std::vector<double> dense() const;

private:
    friend SparseLaplacian laplacian(const SphereGraph& g);
    CsrMatrix csr_;
    double lambda_max_ = 1.0;
};

/// Rows list the diagonal, then the left, right, lower-row and upper-row
/// neighbours, so a circular column shift of the grid permutes rows without
/// changing the arithmetic inside any row.
SparseLaplacian laplacian(const SphereGraph& g);

/// Largest eigenvalue of a symmetric matrix to relative accuracy `rel_tol`,
/// from the Krylov space of power iteration (Lanczos extraction). At most
/// `max_iter` matrix-vector products.
double estimate_lambda_max(const CsrMatrix& a, double rel_tol = 1e-6, int max_iter = 500);

}  // namespace omnigraph
