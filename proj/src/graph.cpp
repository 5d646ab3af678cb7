#include "omnigraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "omnigraph/error.hpp"
#include "omnigraph/rng.hpp"

namespace omnigraph {

std::string_view to_string(GraphMode mode) { return mode == GraphMode::geometry ? "geometry" : "grid"; }

GraphMode parse_graph_mode(std::string_view s) {
    if (s == "geometry") return GraphMode::geometry;
    if (s == "grid") return GraphMode::grid;
    throw DomainError("unknown graph mode '" + std::string(s) + "' (expected geometry or grid)");
}

double default_weight_cap(const EquirectGrid& grid) {
    return 10.0 / chord_distance({0.0, 0.0}, {0.0, grid.delta_theta()});
}

double edge_weight(GraphMode mode, const SphericalPoint& a, const SphericalPoint& b, double w_max) {
    const double d = chord_distance(a, b);
    if (d == 0.0) throw DegenerateEdge("edge between coincident points has zero length");
    if (mode == GraphMode::grid) return 1.0;
    return std::min(1.0 / d, w_max);
}

SphereGraph build_graph(const EquirectGrid& grid, GraphMode mode) {
    const double cap = mode == GraphMode::geometry ? default_weight_cap(grid) : 1.0;
    SphereGraph g{grid, mode, cap, {}};
    const int w = grid.width();
    const int h = grid.height();
    // Horizontal weights are evaluated once per row at theta = 0, so every
    // column of a row gets the same bits and column shifts are exact
    // automorphisms. Vertical chords all span delta_phi along a meridian.
    std::vector<double> across(h);
    for (int v = 0; v < h; ++v) {
        across[v] = edge_weight(mode, {grid.phi(v), 0.0}, {grid.phi(v), grid.delta_theta()}, cap);
    }
    const double up = edge_weight(mode, {0.0, 0.0}, {grid.delta_phi(), 0.0}, cap);
    g.edges.reserve(grid.size() * 2);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const auto n = grid.node(u, v);
            const auto right = grid.node((u + 1) % w, v);
            g.edges.push_back({static_cast<std::uint32_t>(std::min(n, right)),
                               static_cast<std::uint32_t>(std::max(n, right)), across[v]});
            if (v + 1 < h) {
                g.edges.push_back({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(grid.node(u, v + 1)), up});
            }
        }
    }
    return g;
}

void write_edges_csv(const std::filesystem::path& path, const SphereGraph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "i,j,w\n";
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof buf, "%.17g", e.w);
        out << e.i << ',' << e.j << ',' << buf << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

struct Neighbor {
    std::uint32_t col;
    double w;
};

std::vector<std::vector<Neighbor>> adjacency(std::size_t n, std::span<const Edge> edges) {
    std::vector<std::vector<Neighbor>> adj(n);
    for (const auto& e : edges) {
        if (e.i >= n || e.j >= n || e.i == e.j) throw DomainError("edge endpoint out of range or self loop");
        adj[e.i].push_back({e.j, e.w});
        adj[e.j].push_back({e.i, e.w});
    }
    return adj;
}

CsrMatrix assemble(const std::vector<std::vector<Neighbor>>& adj) {
    CsrMatrix m;
    m.n = adj.size();
    m.row_ptr.reserve(m.n + 1);
    m.row_ptr.push_back(0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double degree = 0.0;
        for (const auto& nb : adj[i]) degree += nb.w;
        m.cols.push_back(static_cast<std::uint32_t>(i));
        m.vals.push_back(degree);
        for (const auto& nb : adj[i]) {
            m.cols.push_back(nb.col);
            m.vals.push_back(-nb.w);
        }
        m.row_ptr.push_back(m.vals.size());
    }
    m.finalize();
    return m;
}

}  // namespace

double estimate_lambda_max(const CsrMatrix& a, double rel_tol, int max_iter) {
    if (a.n == 0) return 0.0;
    // Lanczos with full reorthogonalisation over the Krylov space of the
    // power iteration, started from a fixed pseudo-random vector. Stops when
    // the residual bound |beta_k s_k| of the top Ritz pair drops below
    // rel_tol times the Ritz value, which puts an eigenvalue within that
    // distance.
    Rng rng(0x9e3779b97f4a7c15ULL);
    std::vector<double> q(a.n);
    for (auto& v : q) v = rng.uniform(-1.0, 1.0);
    const std::size_t steps = std::min<std::size_t>(a.n, static_cast<std::size_t>(std::max(max_iter, 1)));
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> w(a.n);
    double norm = std::sqrt(kernels::dot(q, q));
    double ritz = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        for (auto& v : q) v /= norm;
        basis.push_back(q);
        kernels::spmv(a, q, w);
        alpha.push_back(kernels::dot(q, w));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) kernels::axpy(-kernels::dot(b, w), b, w);
        }
        norm = std::sqrt(kernels::dot(w, w));

        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
        Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const auto top = diag.size() - 1;
        ritz = tri.eigenvalues()(top);
        const double bound = norm * std::abs(tri.eigenvectors()(top, top));
        if (bound <= rel_tol * std::abs(ritz) || norm <= 1e-14 * std::abs(ritz) || norm == 0.0) break;
        beta.push_back(norm);
        q.swap(w);
    }
    return ritz;
}

SparseLaplacian SparseLaplacian::from_edges(std::size_t n, std::span<const Edge> edges,
                                            std::optional<double> lambda_max) {
    auto adj = adjacency(n, edges);
    for (auto& row : adj) {
        std::sort(row.begin(), row.end(), [](const Neighbor& a, const Neighbor& b) { return a.col < b.col; });
    }
    SparseLaplacian l;
    l.csr_ = assemble(adj);
    l.lambda_max_ = lambda_max ? *lambda_max : estimate_lambda_max(l.csr_);
    if (!(l.lambda_max_ > 0.0)) l.lambda_max_ = 1.0;  // edgeless graph: L = 0
    return l;
}

SparseLaplacian laplacian(const SphereGraph& g) {
    const auto& grid = g.grid;
    auto adj = adjacency(grid.size(), g.edges);
    const int w = grid.width();
    for (std::size_t n = 0; n < adj.size(); ++n) {
        const int u = grid.column(n);
        const int v = grid.row(n);
        auto rank = [&](std::uint32_t c) {
            const int cu = grid.column(c);
            const int cv = grid.row(c);
            if (cv < v) return 2;
            if (cv > v) return 3;
            return cu == (u + w - 1) % w ? 0 : 1;
        };
        std::sort(adj[n].begin(), adj[n].end(),
                  [&](const Neighbor& a, const Neighbor& b) { return rank(a.col) < rank(b.col); });
    }
    SparseLaplacian l;
    l.csr_ = assemble(adj);
    l.lambda_max_ = estimate_lambda_max(l.csr_);
    return l;
}

SparseLaplacian SparseLaplacian::scaled() const {
    SparseLaplacian s = *this;
    for (auto& v : s.csr_.vals) v /= lambda_max_;
    s.csr_.finalize();
    s.lambda_max_ = 1.0;
    return s;
}

void SparseLaplacian::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) throw DimensionMismatch("Laplacian apply: wrong vector length");
    kernels::spmv(csr_, x, y);
}

std::vector<double> SparseLaplacian::dense() const {
    std::vector<double> d(size() * size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t k = csr_.row_ptr[i]; k < csr_.row_ptr[i + 1]; ++k) d[i * size() + csr_.cols[k]] += csr_.vals[k];
    }
    return d;
}

}  // namespace omnigraph
