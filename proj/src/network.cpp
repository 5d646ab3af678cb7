#include "omnigraph/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "omnigraph/error.hpp"
#include "omnigraph/kernels.hpp"
#include "omnigraph/rng.hpp"
#include "omnigraph/spectral.hpp"

namespace omnigraph {

void NetworkConfig::validate(std::size_t n_nodes) const {
    auto fail = [](const std::string& what) { throw ShapeError("network config: " + what); };
    if (j1 < 1 || j2 < 1) fail("filter counts must be positive");
    if (degree < 0) fail("polynomial degree must be non-negative");
    if (!(p1 >= p2 && p2 >= 1)) fail("pooling sizes need P1 >= P2 >= 1");
    if (static_cast<std::size_t>(p1) > n_nodes) {
        fail("P1 = " + std::to_string(p1) + " exceeds the " + std::to_string(n_nodes) + " graph nodes");
    }
    if (scales < 1) fail("statistical scales must be >= 1");
    if (classes < 2) fail("need at least two classes");
    for (int w : fc) {
        if (w < 1) fail("dense layer widths must be positive");
    }
    if (batch_size < 1 || epochs < 0) fail("batch size must be positive and epochs non-negative");
}

NetworkParams NetworkParams::init(const NetworkConfig& cfg) {
    Rng rng(cfg.seed);
    NetworkParams p;
    const int taps = cfg.degree + 1;
    const double spread = 1.0 / taps;
    p.alpha1.resize(static_cast<std::size_t>(cfg.j1) * taps);
    for (auto& a : p.alpha1) a = rng.uniform(-spread, spread);
    p.alpha2.resize(static_cast<std::size_t>(cfg.j1) * cfg.j2 * taps);
    for (auto& a : p.alpha2) a = rng.uniform(-spread, spread);

    int in = cfg.feature_size();
    std::vector<int> widths = cfg.fc;
    widths.push_back(cfg.classes);
    for (int out : widths) {
        DenseLayer l{in, out, std::vector<double>(static_cast<std::size_t>(in) * out), std::vector<double>(out, 0.0)};
        const double limit = std::sqrt(6.0 / in);
        for (auto& w : l.weights) w = rng.uniform(-limit, limit);
        p.fc.push_back(std::move(l));
        in = out;
    }
    p.feature_shift.assign(cfg.feature_size(), 0.0);
    p.feature_scale.assign(cfg.feature_size(), 1.0);
    return p;
}

NetworkParams NetworkParams::zeros_like(const NetworkParams& p) {
    NetworkParams z = p;
    for (auto g : z.groups()) std::fill(g.begin(), g.end(), 0.0);
    return z;
}

std::vector<std::span<double>> NetworkParams::groups() {
    std::vector<std::span<double>> g{alpha1, alpha2};
    for (auto& l : fc) {
        g.emplace_back(l.weights);
        g.emplace_back(l.bias);
    }
    return g;
}

std::vector<std::span<const double>> NetworkParams::groups() const {
    std::vector<std::span<const double>> g{alpha1, alpha2};
    for (const auto& l : fc) {
        g.emplace_back(l.weights);
        g.emplace_back(l.bias);
    }
    return g;
}

void NetworkParams::check(const NetworkConfig& cfg) const {
    const auto taps = static_cast<std::size_t>(cfg.degree + 1);
    if (alpha1.size() != cfg.j1 * taps || alpha2.size() != cfg.j1 * cfg.j2 * taps) {
        throw ShapeError("spectral coefficient arrays do not match the network config");
    }
    const auto nf = static_cast<std::size_t>(cfg.feature_size());
    if (feature_shift.size() != nf || feature_scale.size() != nf) {
        throw ShapeError("feature scaling does not match the network config");
    }
    if (fc.size() != cfg.fc.size() + 1) throw ShapeError("dense layer count does not match the network config");
    int in = cfg.feature_size();
    for (std::size_t i = 0; i < fc.size(); ++i) {
        const int out = i < cfg.fc.size() ? cfg.fc[i] : cfg.classes;
        const auto& l = fc[i];
        if (l.in != in || l.out != out || l.weights.size() != static_cast<std::size_t>(in) * out ||
            l.bias.size() != static_cast<std::size_t>(out)) {
            throw ShapeError("dense layer " + std::to_string(i) + " has the wrong shape");
        }
        in = out;
    }
    for (auto g : groups()) {
        for (double v : g) {
            if (!std::isfinite(v)) throw ShapeError("non-finite network parameter");
        }
    }
    for (std::size_t i = 0; i < nf; ++i) {
        if (!std::isfinite(feature_shift[i]) || !std::isfinite(feature_scale[i])) {
            throw ShapeError("non-finite feature scaling");
        }
    }
}

bool NetworkParams::operator==(const NetworkParams& o) const {
    const auto a = groups();
    const auto b = o.groups();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::equal(a[i].begin(), a[i].end(), b[i].begin(), b[i].end())) return false;
    }
    return feature_shift == o.feature_shift && feature_scale == o.feature_scale;
}

namespace {

using Index = std::vector<std::uint32_t>;

// A length-n vector that is exactly zero outside the sorted index set idx.
// Clearing only touches idx, so reusing one costs its support and not n.
struct SparseVec {
    std::vector<double> v;
    Index idx;

    void reset(std::size_t n) {
        if (v.size() != n) {
            v.assign(n, 0.0);
        } else {
            for (auto i : idx) v[i] = 0.0;
        }
        idx.clear();
    }
};

void load(std::span<const double> x, SparseVec& out) {
    out.reset(x.size());
    for (std::uint32_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) {
            out.v[i] = x[i];
            out.idx.push_back(i);
        }
    }
}

// Indices of the p largest-magnitude entries, sorted; ties go to the lower
// index. `candidates` holds every nonzero of map. With at least p nonzeros
// among them the winners are all candidates, otherwise every index competes.
Index top_magnitude(std::span<const double> map, const Index& candidates, std::size_t p) {
    Index idx;
    if (p >= map.size()) {
        idx.resize(map.size());
        std::iota(idx.begin(), idx.end(), 0u);
        return idx;
    }
    std::size_t nonzero = 0;
    for (auto i : candidates) nonzero += map[i] != 0.0 ? 1 : 0;
    std::vector<std::pair<double, std::uint32_t>> mag;
    if (nonzero >= p) {
        mag.reserve(candidates.size());
        for (auto i : candidates) mag.emplace_back(std::abs(map[i]), i);
    } else {
        mag.resize(map.size());
        for (std::uint32_t i = 0; i < mag.size(); ++i) mag[i] = {std::abs(map[i]), i};
    }
    auto before = [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    };
    std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(p), mag.end(), before);
    idx.resize(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = mag[i].second;
    std::sort(idx.begin(), idx.end());
    return idx;
}

void pool_into(const SparseVec& map, std::size_t p, SparseVec& out, Index& kept) {
    kept = top_magnitude(map.v, map.idx, p);
    out.reset(map.v.size());
    for (auto i : kept) out.v[i] = map.v[i];
    out.idx = kept;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct Moments {
    double mean;
    double var;
};

// Moments of |z| over all n entries. Entries outside the support are zero
// and contribute |0| - mean = -mean each to the variance, added in closed form.
Moments abs_moments(const SparseVec& z) {
    const auto n = static_cast<double>(z.v.size());
    double mean = 0.0;
    for (auto i : z.idx) mean += std::abs(z.v[i]);
    mean /= n;
    double var = 0.0;
    for (auto i : z.idx) {
        const double d = std::abs(z.v[i]) - mean;
        var += d * d;
    }
    var += static_cast<double>(z.v.size() - z.idx.size()) * mean * mean;
    return {mean, var / n};
}

// Per-thread buffers of the backward pass.
struct Scratch {
    SparseVec dz;
    SparseVec acc;
    SparseVec u;
    std::vector<double> y;
    Index nb;
    Index merged;
    std::vector<std::vector<double>> do2;  // [k] on kept2[k]
    std::vector<double> dh;                // on kept1[j]
};

// Everything the backward pass needs from one forward evaluation.
struct Trace {
    std::vector<SparseVec> t1;               // L^m x
    std::vector<SparseVec> h1;               // layer 1 maps
    std::vector<Index> kept1;
    std::vector<std::vector<SparseVec>> t2;  // [j][m] L^m (pooled h1_j)
    std::vector<SparseVec> o2;               // layer 2 maps
    std::vector<Index> kept2;
    std::vector<SparseVec> q2;               // pooled layer 2
    std::vector<Index> z_idx;                // [k][s] support of L^s q2_k
    std::vector<std::vector<double>> z;      // [k][s] L^s q2_k on z_idx
    std::vector<Moments> moments;            // [k][s]
    std::vector<double> features;
    std::vector<std::vector<double>> acts;  // input of every dense layer
    std::vector<std::vector<double>> pre;   // pre-activation of every dense layer
    std::vector<double> probs;

    std::vector<std::uint8_t> mark;  // zero between uses
    SparseVec buf_a;
    SparseVec buf_b;
    Scratch sc;
};

// y = L_s x, evaluated only on the rows it can be nonzero.
void apply_into(const SparseLaplacian& ls, const SparseVec& x, SparseVec& y, std::vector<std::uint8_t>& mark) {
    y.reset(x.v.size());
    kernels::neighbourhood(ls.csr(), x.idx, y.idx, mark);
    kernels::spmv_rows(ls.csr(), x.v, y.v, 1.0 / ls.lambda_max(), y.idx);
}

void spectral_layers(const NetworkParams& p, const NetworkConfig& cfg, std::span<const double> x,
                     const SparseLaplacian& ls, Trace& tr) {
    const std::size_t n = x.size();
    const int taps = cfg.degree + 1;
    if (tr.mark.size() != n) tr.mark.assign(n, 0);
    tr.t1.resize(taps);
    load(x, tr.t1[0]);
    for (int m = 1; m < taps; ++m) apply_into(ls, tr.t1[m - 1], tr.t1[m], tr.mark);

    // Supports are nested, the last power's holds all the others.
    tr.h1.resize(cfg.j1);
    tr.kept1.resize(cfg.j1);
    tr.t2.resize(cfg.j1);
    for (int j = 0; j < cfg.j1; ++j) {
        auto& h = tr.h1[j];
        h.reset(n);
        h.idx = tr.t1[taps - 1].idx;
        for (int m = 0; m < taps; ++m) {
            const double a = p.alpha1[j * taps + m];
            const auto& t = tr.t1[m];
            for (auto i : t.idx) h.v[i] += a * t.v[i];
        }
        tr.t2[j].resize(taps);
        pool_into(h, cfg.p1, tr.t2[j][0], tr.kept1[j]);
        for (int m = 1; m < taps; ++m) apply_into(ls, tr.t2[j][m - 1], tr.t2[j][m], tr.mark);
    }

    Index all;
    Index merged;
    for (int j = 0; j < cfg.j1; ++j) {
        const auto& idx = tr.t2[j][taps - 1].idx;
        merged.clear();
        std::set_union(all.begin(), all.end(), idx.begin(), idx.end(), std::back_inserter(merged));
        std::swap(all, merged);
    }
    tr.o2.resize(cfg.j2);
    tr.q2.resize(cfg.j2);
    tr.kept2.resize(cfg.j2);
    for (int k = 0; k < cfg.j2; ++k) {
        tr.o2[k].reset(n);
        tr.o2[k].idx = all;
    }
    // Node blocks keep the j1 x taps sources in cache across all outputs.
    // Each entry still accumulates in (j, m) order.
    constexpr std::size_t kBlock = 1024;
    const std::size_t lists = static_cast<std::size_t>(cfg.j1) * taps;
    std::vector<std::size_t> begin(lists, 0);
    std::vector<std::size_t> end(lists, 0);
    for (std::size_t b0 = 0; b0 < n; b0 += kBlock) {
        for (std::size_t l = 0; l < lists; ++l) {
            const auto& idx = tr.t2[l / taps][l % taps].idx;
            std::size_t e = begin[l];
            while (e < idx.size() && idx[e] < b0 + kBlock) ++e;
            end[l] = e;
        }
        for (int k = 0; k < cfg.j2; ++k) {
            auto& dst = tr.o2[k].v;
            for (int j = 0; j < cfg.j1; ++j) {
                const double* a = &p.alpha2[(static_cast<std::size_t>(j) * cfg.j2 + k) * taps];
                for (int m = 0; m < taps; ++m) {
                    const std::size_t l = static_cast<std::size_t>(j) * taps + m;
                    const auto& t = tr.t2[j][m];
                    for (std::size_t q = begin[l]; q < end[l]; ++q) {
                        const auto i = t.idx[q];
                        dst[i] += a[m] * t.v[i];
                    }
                }
            }
        }
        begin = end;
    }
    for (int k = 0; k < cfg.j2; ++k) pool_into(tr.o2[k], cfg.p2, tr.q2[k], tr.kept2[k]);
}

void statistics(const NetworkConfig& cfg, const SparseLaplacian& ls, Trace& tr) {
    const std::size_t count = static_cast<std::size_t>(cfg.j2) * cfg.scales;
    tr.z.resize(count);
    tr.z_idx.resize(count);
    tr.moments.resize(count);
    tr.features.resize(cfg.feature_size());
    for (int k = 0; k < cfg.j2; ++k) {
        const SparseVec* cur = &tr.q2[k];
        for (int s = 0; s < cfg.scales; ++s) {
            if (s > 0) {
                auto& next = s % 2 == 1 ? tr.buf_a : tr.buf_b;
                apply_into(ls, *cur, next, tr.mark);
                cur = &next;
            }
            const std::size_t ks = static_cast<std::size_t>(k) * cfg.scales + s;
            const auto mo = tr.moments[ks] = abs_moments(*cur);
            tr.z_idx[ks] = cur->idx;
            auto& zc = tr.z[ks];
            zc.resize(cur->idx.size());
            for (std::size_t q = 0; q < zc.size(); ++q) zc[q] = cur->v[cur->idx[q]];
            tr.features[ks * 2] = mo.mean;
            tr.features[ks * 2 + 1] = mo.var;
        }
    }
}

void dense_head(const NetworkParams& p, Trace& tr) {
    const std::size_t layers = p.fc.size();
    tr.acts.resize(layers);
    tr.pre.resize(layers);
    tr.acts[0].resize(tr.features.size());
    for (std::size_t i = 0; i < tr.features.size(); ++i) {
        tr.acts[0][i] = (tr.features[i] - p.feature_shift[i]) * p.feature_scale[i];
    }
    for (std::size_t l = 0; l < layers; ++l) {
        const auto& L = p.fc[l];
        auto& z = tr.pre[l];
        z.assign(L.bias.begin(), L.bias.end());
        for (int o = 0; o < L.out; ++o) {
            const double* w = &L.weights[static_cast<std::size_t>(o) * L.in];
            double s = 0.0;
            for (int i = 0; i < L.in; ++i) s += w[i] * tr.acts[l][i];
            z[o] += s;
        }
        if (l + 1 < layers) {
            auto& next = tr.acts[l + 1];
            next.resize(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) next[i] = std::max(z[i], 0.0);
        }
    }
    const auto& logits = tr.pre.back();
    const double mx = *std::max_element(logits.begin(), logits.end());
    tr.probs.resize(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) total += tr.probs[i] = std::exp(logits[i] - mx);
    for (auto& v : tr.probs) v /= total;
}

void run_forward(const NetworkParams& p, const NetworkConfig& cfg, std::span<const double> x,
                 const SparseLaplacian& ls, Trace& tr) {
    spectral_layers(p, cfg, x, ls, tr);
    statistics(cfg, ls, tr);
    dense_head(p, tr);
}

void check_inputs(const NetworkParams& p, const NetworkConfig& cfg, std::size_t n_input, const SparseLaplacian& ls) {
    cfg.validate(ls.size());
    p.check(cfg);
    if (n_input != ls.size()) {
        throw ShapeError("input has " + std::to_string(n_input) + " values, graph has " + std::to_string(ls.size()) +
                         " nodes");
    }
}


// acc <- L_s acc + add, the Horner step for sum_m L_s^m v_m.
void horner_step(const SparseLaplacian& ls, SparseVec& acc, const SparseVec& add, Scratch& sc,
                 std::vector<std::uint8_t>& mark) {
    kernels::neighbourhood(ls.csr(), acc.idx, sc.nb, mark);
    sc.merged.clear();
    std::set_union(sc.nb.begin(), sc.nb.end(), add.idx.begin(), add.idx.end(), std::back_inserter(sc.merged));
    sc.y.resize(acc.v.size());
    kernels::spmv_rows(ls.csr(), acc.v, sc.y, 1.0 / ls.lambda_max(), sc.merged);
    for (auto i : sc.merged) acc.v[i] = sc.y[i] + add.v[i];
    std::swap(acc.idx, sc.merged);
}

void copy_into(const SparseVec& x, SparseVec& out) {
    out.reset(x.v.size());
    out.idx = x.idx;
    for (auto i : x.idx) out.v[i] = x.v[i];
}

// Gradient of one sample. The dense weights get a single product per sample,
// so only the deltas and layer inputs are kept and the products are summed
// over the batch afterwards.
struct SampleGrad {
    std::vector<double> alpha1;
    std::vector<double> alpha2;
    std::vector<std::vector<double>> delta;  // [l] d(loss)/d(output of dense layer l)
    std::vector<std::vector<double>> acts;   // [l] input of dense layer l
};

void backward(const NetworkParams& p, const NetworkConfig& cfg, const SparseLaplacian& ls, Trace& tr,
              std::vector<double> delta, SampleGrad& g) {
    // dense head
    g.acts = tr.acts;
    g.delta.resize(p.fc.size());
    for (std::size_t l = p.fc.size(); l-- > 0;) {
        const auto& L = p.fc[l];
        std::vector<double> dx(L.in, 0.0);
        for (int o = 0; o < L.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* w = &L.weights[static_cast<std::size_t>(o) * L.in];
            for (int i = 0; i < L.in; ++i) dx[i] += d * w[i];
        }
        if (l > 0) {
            const auto& z = tr.pre[l - 1];
            for (std::size_t i = 0; i < dx.size(); ++i) {
                if (!(z[i] > 0.0)) dx[i] = 0.0;
            }
        }
        g.delta[l] = std::move(delta);
        delta = std::move(dx);
    }
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= p.feature_scale[i];
    const auto& dfeat = delta;

    const std::size_t n = ls.size();
    const int taps = cfg.degree + 1;
    auto& sc = tr.sc;
    g.alpha1.assign(p.alpha1.size(), 0.0);
    g.alpha2.assign(p.alpha2.size(), 0.0);

    // statistical layer and second pooling
    sc.do2.resize(cfg.j2);
    for (int k = 0; k < cfg.j2; ++k) {
        for (int s = cfg.scales - 1; s >= 0; --s) {
            const std::size_t ks = static_cast<std::size_t>(k) * cfg.scales + s;
            const auto& zi = tr.z_idx[ks];
            const auto& z = tr.z[ks];
            const auto& mo = tr.moments[ks];
            const double d_mean = dfeat[ks * 2] / static_cast<double>(n);
            const double d_var = 2.0 * dfeat[ks * 2 + 1] / static_cast<double>(n);
            // sign(0) = 0, so dz vanishes outside the support of z
            sc.dz.reset(n);
            sc.dz.idx = zi;
            for (std::size_t q = 0; q < zi.size(); ++q) {
                sc.dz.v[zi[q]] = sign(z[q]) * (d_mean + d_var * (std::abs(z[q]) - mo.mean));
            }
            if (s == cfg.scales - 1) {
                copy_into(sc.dz, sc.acc);
            } else {
                horner_step(ls, sc.acc, sc.dz, sc, tr.mark);
            }
        }
        const auto& kept = tr.kept2[k];
        sc.do2[k].resize(kept.size());
        for (std::size_t q = 0; q < kept.size(); ++q) sc.do2[k][q] = sc.acc.v[kept[q]];
    }

    // second spectral layer; u is only ever written at pooled layer-2 nodes
    sc.u.reset(n);
    for (int k = 0; k < cfg.j2; ++k) {
        sc.merged.clear();
        std::set_union(sc.u.idx.begin(), sc.u.idx.end(), tr.kept2[k].begin(), tr.kept2[k].end(),
                       std::back_inserter(sc.merged));
        std::swap(sc.u.idx, sc.merged);
    }
    for (int j = 0; j < cfg.j1; ++j) {
        for (int m = taps - 1; m >= 0; --m) {
            for (auto i : sc.u.idx) sc.u.v[i] = 0.0;
            const auto& t = tr.t2[j][m].v;
            for (int k = 0; k < cfg.j2; ++k) {
                const std::size_t a = (static_cast<std::size_t>(j) * cfg.j2 + k) * taps + m;
                const auto& kept = tr.kept2[k];
                const auto& d = sc.do2[k];
                double dot = 0.0;
                for (std::size_t q = 0; q < kept.size(); ++q) dot += d[q] * t[kept[q]];
                g.alpha2[a] += dot;
                for (std::size_t q = 0; q < kept.size(); ++q) sc.u.v[kept[q]] += p.alpha2[a] * d[q];
            }
            if (m == taps - 1) {
                copy_into(sc.u, sc.acc);
            } else {
                horner_step(ls, sc.acc, sc.u, sc, tr.mark);
            }
        }
        const auto& kept = tr.kept1[j];
        sc.dh.resize(kept.size());
        for (std::size_t q = 0; q < kept.size(); ++q) sc.dh[q] = sc.acc.v[kept[q]];
        for (int m = 0; m < taps; ++m) {
            const auto& t = tr.t1[m].v;
            double dot = 0.0;
            for (std::size_t q = 0; q < kept.size(); ++q) dot += sc.dh[q] * t[kept[q]];
            g.alpha1[j * taps + m] += dot;
        }
    }
}

}  // namespace

std::vector<double> dynamic_pool(std::span<const double> map, std::size_t p) {
    if (p < 1 || p > map.size()) throw ShapeError("pooling size must lie in [1, N]");
    SparseVec in;
    SparseVec out;
    Index kept;
    load(map, in);
    pool_into(in, p, out, kept);
    return out.v;
}

std::vector<double> statistical_layer(std::span<const std::vector<double>> maps, const SparseLaplacian& ls,
                                      int scales) {
    if (scales < 1) throw ShapeError("statistical layer needs at least one scale");
    std::vector<double> out;
    out.reserve(maps.size() * scales * 2);
    std::vector<std::uint8_t> mark(ls.size(), 0);
    SparseVec a;
    SparseVec b;
    for (const auto& y : maps) {
        if (y.size() != ls.size()) throw ShapeError("feature map length does not match the graph");
        load(y, a);
        for (int s = 0; s < scales; ++s) {
            if (s > 0) {
                apply_into(ls, a, b, mark);
                std::swap(a, b);
            }
            const auto mo = abs_moments(a);
            out.push_back(mo.mean);
            out.push_back(mo.var);
        }
    }
    return out;
}

int argmax(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

ForwardResult forward(const NetworkParams& params, const NetworkConfig& cfg, const EquirectImage& x,
                      const SparseLaplacian& ls) {
    check_inputs(params, cfg, x.values.size(), ls);
    Trace tr;
    run_forward(params, cfg, x.values, ls, tr);
    return {tr.pre.back(), tr.probs, tr.features};
}

LayerMaps feature_maps(const NetworkParams& params, const NetworkConfig& cfg, const EquirectImage& x,
                       const SparseLaplacian& ls) {
    check_inputs(params, cfg, x.values.size(), ls);
    Trace tr;
    spectral_layers(params, cfg, x.values, ls, tr);
    LayerMaps out;
    for (const auto& h : tr.h1) out.layer1.push_back(h.v);
    for (const auto& o : tr.o2) out.layer2.push_back(o.v);
    return out;
}

std::vector<Example> examples(std::span<const Sample> samples) {
    std::vector<Example> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({&s.image, s.label});
    return out;
}

LossAndGrad loss_and_grad(const NetworkParams& params, const NetworkConfig& cfg, std::span<const Example> batch,
                          const SparseLaplacian& ls) {
    if (batch.empty()) throw ShapeError("loss_and_grad needs a non-empty batch");
    cfg.validate(ls.size());
    params.check(cfg);
    for (const auto& ex : batch) {
        if (ex.image->values.size() != ls.size()) throw ShapeError("batch image does not match the graph");
        if (ex.label < 0 || ex.label >= cfg.classes) throw ShapeError("label out of range");
    }
    const auto count = static_cast<std::ptrdiff_t>(batch.size());
    std::vector<SampleGrad> grads(batch.size());
    std::vector<double> losses(batch.size());
    std::vector<int> hits(batch.size());

#pragma omp parallel
    {
        Trace tr;
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t b = 0; b < count; ++b) {
            const auto& ex = batch[b];
            run_forward(params, cfg, ex.image->values, ls, tr);
            losses[b] = -std::log(tr.probs[ex.label]);
            hits[b] = argmax(tr.probs) == ex.label ? 1 : 0;
            std::vector<double> delta = tr.probs;
            delta[ex.label] -= 1.0;
            for (auto& d : delta) d /= static_cast<double>(count);
            backward(params, cfg, ls, tr, std::move(delta), grads[b]);
        }
    }

    // Every sum runs in batch order, whatever the thread count.
    LossAndGrad out{0.0, NetworkParams::zeros_like(params), 0};
    for (std::size_t b = 0; b < batch.size(); ++b) {
        out.loss += losses[b];
        out.correct += hits[b];
        for (std::size_t i = 0; i < params.alpha1.size(); ++i) out.grad.alpha1[i] += grads[b].alpha1[i];
        for (std::size_t i = 0; i < params.alpha2.size(); ++i) out.grad.alpha2[i] += grads[b].alpha2[i];
    }
    for (std::size_t l = 0; l < params.fc.size(); ++l) {
        auto& G = out.grad.fc[l];
        const int in = params.fc[l].in;
#pragma omp parallel for schedule(static)
        for (int o = 0; o < params.fc[l].out; ++o) {
            double* gw = &G.weights[static_cast<std::size_t>(o) * in];
            for (const auto& g : grads) {
                const double d = g.delta[l][o];
                if (d == 0.0) continue;
                G.bias[o] += d;
                const double* x = g.acts[l].data();
                for (int i = 0; i < in; ++i) gw[i] += d * x[i];
            }
        }
    }
    out.loss /= static_cast<double>(count);
    return out;
}

Adam::Adam(const NetworkConfig& cfg, const NetworkParams& like)
    : lr_(cfg.learning_rate),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      eps_(cfg.epsilon),
      m_(NetworkParams::zeros_like(like)),
      v_(NetworkParams::zeros_like(like)) {}

void Adam::step(NetworkParams& params, const NetworkParams& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto p = params.groups();
    const auto g = grad.groups();
    auto m = m_.groups();
    auto v = v_.groups();
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t k = 0; k < p[i].size(); ++k) {
            m[i][k] = beta1_ * m[i][k] + (1.0 - beta1_) * g[i][k];
            v[i][k] = beta2_ * v[i][k] + (1.0 - beta2_) * g[i][k] * g[i][k];
            p[i][k] -= lr_ * (m[i][k] / c1) / (std::sqrt(v[i][k] / c2) + eps_);
        }
    }
}

EvalResult evaluate(const NetworkParams& params, const NetworkConfig& cfg, std::span<const Sample> split,
                    const SparseLaplacian& ls) {
    if (split.empty()) throw ShapeError("cannot evaluate an empty split");
    check_inputs(params, cfg, split.front().image.values.size(), ls);
    std::vector<int> predicted(split.size());
    const auto count = static_cast<std::ptrdiff_t>(split.size());
#pragma omp parallel
    {
        Trace tr;
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            run_forward(params, cfg, split[i].image.values, ls, tr);
            predicted[i] = argmax(tr.probs);
        }
    }
    EvalResult r;
    r.confusion.assign(cfg.classes, std::vector<int>(cfg.classes, 0));
    int correct = 0;
    for (std::size_t i = 0; i < split.size(); ++i) {
        const int truth = split[i].label;
        if (truth < 0 || truth >= cfg.classes) throw ShapeError("label out of range");
        ++r.confusion[truth][predicted[i]];
        correct += truth == predicted[i] ? 1 : 0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(split.size());
    return r;
}

void fit_feature_scaling(NetworkParams& params, const NetworkConfig& cfg, std::span<const Sample> samples,
                         const SparseLaplacian& ls) {
    if (samples.empty()) throw ShapeError("cannot fit feature scaling on an empty set");
    check_inputs(params, cfg, samples.front().image.values.size(), ls);
    const auto count = static_cast<std::ptrdiff_t>(samples.size());
    std::vector<std::vector<double>> feats(samples.size());
#pragma omp parallel
    {
        Trace tr;
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            spectral_layers(params, cfg, samples[i].image.values, ls, tr);
            statistics(cfg, ls, tr);
            feats[i] = tr.features;
        }
    }
    const std::size_t nf = cfg.feature_size();
    for (std::size_t f = 0; f < nf; ++f) {
        double mean = 0.0;
        for (const auto& v : feats) mean += v[f];
        mean /= static_cast<double>(count);
        double var = 0.0;
        for (const auto& v : feats) var += (v[f] - mean) * (v[f] - mean);
        var /= static_cast<double>(count);
        params.feature_shift[f] = mean;
        params.feature_scale[f] = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    }
}

TrainResult train(const NetworkConfig& cfg, std::span<const Sample> train_set, std::span<const Sample> val_set,
                  const SparseLaplacian& ls) {
    if (train_set.empty()) throw ShapeError("training set is empty");
    cfg.validate(ls.size());
    TrainResult result;
    NetworkParams params = NetworkParams::init(cfg);
    fit_feature_scaling(params, cfg, train_set, ls);
    result.params = params;
    Adam opt(cfg, params);
    Rng rng(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL);

    const auto all = examples(train_set);
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double best = -1.0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        int correct = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<Example> batch;
            for (std::size_t i = start; i < end; ++i) batch.push_back(all[order[i]]);
            auto lg = loss_and_grad(params, cfg, batch, ls);
            if (!std::isfinite(lg.loss)) {
                throw DivergenceError("training loss became non-finite in epoch " + std::to_string(epoch));
            }
            loss_sum += lg.loss * static_cast<double>(batch.size());
            correct += lg.correct;
            opt.step(params, lg.grad);
        }
        EpochLog entry{epoch, loss_sum / static_cast<double>(order.size()),
                       static_cast<double>(correct) / static_cast<double>(order.size()), 0.0};
        entry.val_accuracy = val_set.empty() ? entry.train_accuracy : evaluate(params, cfg, val_set, ls).accuracy;
        result.log.push_back(entry);
        if (entry.val_accuracy > best) {
            best = entry.val_accuracy;
            result.params = params;
            result.best_epoch = epoch;
        }
    }
    return result;
}

SparseLaplacian network_laplacian(const EquirectGrid& grid, GraphMode mode) {
    return laplacian(build_graph(grid, mode)).scaled();
}

TrainResult train(const NetworkConfig& cfg, const Dataset& ds, GraphMode mode) {
    return train(cfg, ds.train, ds.val, network_laplacian(ds.grid, mode));
}

void write_training_log_csv(const std::filesystem::path& path, std::span<const EpochLog> log) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "epoch,loss,train_acc,val_acc\n";
    char buf[128];
    for (const auto& e : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", e.epoch, e.loss, e.train_accuracy, e.val_accuracy);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace omnigraph
