#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "omnigraph/error.hpp"
#include "omnigraph/graph.hpp"
#include "omnigraph/rng.hpp"
#include "omnigraph/spectral.hpp"

using namespace omnigraph;

namespace {

double horizontal_weight(const SphereGraph& g, int v) {
    for (const auto& e : g.edges) {
        if (g.grid.row(e.i) == v && g.grid.row(e.j) == v) return e.w;
    }
    return -1.0;
}

std::vector<double> vertical_weights(const SphereGraph& g) {
    std::vector<double> w;
    for (const auto& e : g.edges) {
        if (g.grid.row(e.i) != g.grid.row(e.j)) w.push_back(e.w);
    }
    return w;
}

}  // namespace

TEST_CASE("smallest grid has twelve edges and degree-3 boundary rows") {
    const auto g = build_graph(EquirectGrid(4, 2), GraphMode::geometry);
    CHECK(g.edges.size() == 12);
    std::vector<int> degree(8, 0);
    for (const auto& e : g.edges) {
        CHECK(e.i < e.j);
        CHECK(e.w > 0.0);
        CHECK(e.w <= g.w_max);
        ++degree[e.i];
        ++degree[e.j];
    }
    for (int d : degree) CHECK(d == 3);
}

TEST_CASE("edge count and degrees on the default grid") {
    const EquirectGrid grid(128, 64);
    const auto g = build_graph(grid, GraphMode::grid);
    CHECK(g.edges.size() == 128u * 64 + 128u * 63);
    for (const auto& e : g.edges) CHECK(e.w == 1.0);
}

TEST_CASE("geometry weights follow 1/cos(phi) until the cap") {
    const EquirectGrid grid(128, 64);
    const auto g = build_graph(grid, GraphMode::geometry);
    CHECK(g.w_max == doctest::Approx(10.0 / (2.0 * std::sin(grid.delta_theta() / 2))).epsilon(1e-14));
    const int mid = grid.height() / 2;
    const double product0 = horizontal_weight(g, mid) * std::cos(grid.phi(mid));
    int capped = 0;
    for (int v = 0; v < grid.height(); ++v) {
        const double w = horizontal_weight(g, v);
        if (w == g.w_max) {
            ++capped;
            continue;
        }
        CHECK(std::abs(w * std::cos(grid.phi(v)) / product0 - 1.0) < 1e-12);
        if (v < mid - 1) CHECK(w > horizontal_weight(g, v + 1));  // heavier towards the south pole
        if (v >= mid) CHECK(w < horizontal_weight(g, v + 1) + 1e-9);
    }
    CHECK(capped > 0);
    CHECK(capped < 8);
    const auto vw = vertical_weights(g);
    for (double w : vw) CHECK(w == vw.front());
    CHECK(vw.front() == doctest::Approx(1.0 / (2.0 * std::sin(grid.delta_phi() / 2))).epsilon(1e-12));
}

TEST_CASE("degenerate edges") {
    CHECK_THROWS_AS(edge_weight(GraphMode::geometry, {0.1, 0.2}, {0.1, 0.2}, 10.0), DegenerateEdge);
    CHECK_THROWS_AS(edge_weight(GraphMode::grid, {0.1, 0.2}, {0.1, 0.2}, 10.0), DegenerateEdge);
    CHECK(edge_weight(GraphMode::grid, {0.1, 0.2}, {0.1, 0.3}, 10.0) == 1.0);
    CHECK_THROWS_AS(parse_graph_mode("hex"), DomainError);
}

TEST_CASE("two-node Laplacian") {
    const std::vector<Edge> e{{0, 1, 2.5}};
    const auto l = SparseLaplacian::from_edges(2, e);
    CHECK(l.dense() == std::vector<double>{2.5, -2.5, -2.5, 2.5});
    CHECK(l.lambda_max() == doctest::Approx(5.0).epsilon(1e-6));
    std::vector<double> y(2);
    l.apply(std::vector<double>{1.0, 0.0}, y);
    CHECK(y == std::vector<double>{2.5, -2.5});
    std::vector<double> wrong(3);
    CHECK_THROWS_AS(l.apply(wrong, y), DimensionMismatch);
    const auto s = l.scaled();
    CHECK(s.lambda_max() == 1.0);
    CHECK(s.dense()[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rows sum to zero and the Laplacian is positive semidefinite") {
    for (auto mode : {GraphMode::geometry, GraphMode::grid}) {
        const auto l = laplacian(build_graph(EquirectGrid(128, 64), mode));
        const auto& a = l.csr();
        for (std::size_t i = 0; i < a.n; ++i) {
            double s = 0.0;
            double mag = 0.0;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
                s += a.vals[k];
                mag += std::abs(a.vals[k]);
            }
            CHECK(std::abs(s) <= 1e-10 * mag);
        }
        Rng rng(17);
        std::vector<double> x(a.n);
        std::vector<double> y(a.n);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            l.apply(x, y);
            double q = 0.0;
            for (std::size_t i = 0; i < a.n; ++i) q += x[i] * y[i];
            worst = std::min(worst, q);
        }
        CHECK(worst >= -1e-9);
    }
}

TEST_CASE("column shift is a graph automorphism") {
    const EquirectGrid grid(16, 8);
    const auto l = laplacian(build_graph(grid, GraphMode::geometry));
    const auto a = l.dense();
    const std::size_t n = grid.size();
    for (int k : {1, 5, 15}) {
        auto perm = [&](std::size_t i) { return grid.node((grid.column(i) + k) % grid.width(), grid.row(i)); };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) CHECK(a[perm(i) * n + perm(j)] == a[i * n + j]);
        }
    }
}

TEST_CASE("lambda_max of the grid graph matches the closed form") {
    // cycle C_W times path P_H: eigenvalues (2 - 2 cos(2 pi k / W)) + (2 - 2 cos(pi l / H))
    const EquirectGrid grid(128, 64);
    const auto l = laplacian(build_graph(grid, GraphMode::grid));
    const double exact = 4.0 + 2.0 - 2.0 * std::cos(kPi * (grid.height() - 1) / grid.height());
    CHECK(std::abs(l.lambda_max() - exact) / exact < 1e-5);
}

TEST_CASE("lambda_max of a small geometry graph matches the dense spectrum") {
    const auto l = laplacian(build_graph(EquirectGrid(16, 8), GraphMode::geometry));
    const auto d = decompose(l);
    const double top = *std::max_element(d.eigenvalues.begin(), d.eigenvalues.end());
    CHECK(std::abs(l.lambda_max() - top) / top < 1e-5);
}

TEST_CASE("edge list CSV") {
    const auto g = build_graph(EquirectGrid(8, 4), GraphMode::geometry);
    const auto path = std::filesystem::temp_directory_path() / "omnigraph_test_edges.csv";
    write_edges_csv(path, g);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "i,j,w");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto& e = g.edges[rows];
        CHECK(std::stoul(line.substr(0, c1)) == e.i);
        CHECK(std::stoul(line.substr(c1 + 1, c2 - c1 - 1)) == e.j);
        CHECK(std::stod(line.substr(c2 + 1)) == e.w);
        ++rows;
    }
    CHECK(rows == g.edges.size());
}
