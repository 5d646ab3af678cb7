#include "omnigraph/dataset.hpp"

#include <algorithm>
#include <string>

#include "omnigraph/binary_io.hpp"
#include "omnigraph/error.hpp"
#include "omnigraph/rng.hpp"

namespace omnigraph {

std::vector<SphericalPoint> default_positions() {
    std::vector<SphericalPoint> out;
    for (double phi : {0.0, 0.125, 0.25}) {
        for (double theta : {-0.125, 0.0, 0.125}) out.emplace_back(phi, theta);
    }
    return out;
}

bool DatasetSpec::operator==(const DatasetSpec& o) const {
    if (positions.size() != o.positions.size()) return false;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i].phi() != o.positions[i].phi() || positions[i].theta() != o.positions[i].theta()) {
            return false;
        }
    }
    return classes == o.classes && train == o.train && val == o.val && test == o.test && seed == o.seed &&
           half_extent == o.half_extent;
}

namespace {

struct Pool {
    std::vector<std::size_t> order;  // shuffled source indices of the requested classes
    std::vector<int> class_of;       // per source image, -1 when not requested
};

Pool draw_pool(const DatasetSpec& spec, const std::vector<LabeledImage>& source, Rng& rng) {
    Pool p;
    p.class_of.assign(source.size(), -1);
    for (std::size_t i = 0; i < source.size(); ++i) {
        auto it = std::find(spec.classes.begin(), spec.classes.end(), source[i].label);
        if (it != spec.classes.end()) {
            p.class_of[i] = static_cast<int>(it - spec.classes.begin());
            p.order.push_back(i);
        }
    }
    const auto total = static_cast<std::size_t>(spec.total());
    if (p.order.size() < total) {
        throw InsufficientData("source has " + std::to_string(p.order.size()) +
                               " images of the requested classes, splits need " + std::to_string(total));
    }
    rng.shuffle(p.order);
    return p;
}

}  // namespace

Dataset build_mnist012(const DatasetSpec& spec, const EquirectGrid& grid, const std::vector<LabeledImage>& source) {
    if (spec.positions.empty()) throw DomainError("dataset needs at least one tangency position");
    if (spec.train < 0 || spec.val < 0 || spec.test < 0 || spec.total() == 0) {
        throw DomainError("dataset split sizes must be non-negative and not all zero");
    }
    std::vector<TangentFrame> frames;
    for (const auto& p : spec.positions) frames.emplace_back(p);

    Rng rng(spec.seed);
    auto [pool, class_of] = draw_pool(spec, source, rng);
    const auto total = static_cast<std::size_t>(spec.total());
    pool.resize(total);
    std::vector<int> position(total);
    for (auto& p : position) p = static_cast<int>(rng.index(spec.positions.size()));

    std::vector<EquirectImage> rendered(total, EquirectImage(grid));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
        rendered[i] = render_equirect_serial(source[pool[i]].image, frames[position[i]], grid, spec.half_extent);
    }

    Dataset ds{grid, spec, {}, {}, {}};
    for (std::size_t i = 0; i < total; ++i) {
        Sample s{std::move(rendered[i]), class_of[pool[i]], position[i]};
        if (i < static_cast<std::size_t>(spec.train)) {
            ds.train.push_back(std::move(s));
        } else if (i < static_cast<std::size_t>(spec.train + spec.val)) {
            ds.val.push_back(std::move(s));
        } else {
            ds.test.push_back(std::move(s));
        }
    }
    return ds;
}

std::vector<PlanarImage> held_out_images(const DatasetSpec& spec, const std::vector<LabeledImage>& source) {
    Rng rng(spec.seed);
    const auto pool = draw_pool(spec, source, rng);
    std::vector<PlanarImage> out;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        auto it = std::find_if(pool.order.begin() + spec.total(), pool.order.end(),
                               [&](std::size_t i) { return pool.class_of[i] == static_cast<int>(c); });
        if (it == pool.order.end()) {
            throw InsufficientData("no image of class " + std::to_string(spec.classes[c]) +
                                   " left outside the dataset splits");
        }
        out.push_back(source[*it].image);
    }
    return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
    ByteWriter w;
    w.bytes("OGDS");
    w.u32(kDatasetCacheVersion);
    w.u32(static_cast<std::uint32_t>(ds.grid.width()));
    w.u32(static_cast<std::uint32_t>(ds.grid.height()));
    w.u32(static_cast<std::uint32_t>(ds.spec.positions.size()));
    for (const auto& p : ds.spec.positions) {
        w.f64(p.phi());
        w.f64(p.theta());
    }
    w.u32(static_cast<std::uint32_t>(ds.spec.train));
    w.u32(static_cast<std::uint32_t>(ds.spec.val));
    w.u32(static_cast<std::uint32_t>(ds.spec.test));
    w.u64(ds.spec.seed);
    w.f64(ds.spec.half_extent);
    w.u32(static_cast<std::uint32_t>(ds.spec.classes.size()));
    for (int c : ds.spec.classes) w.i32(c);
    for (const auto* split : {&ds.train, &ds.val, &ds.test}) {
        w.u32(static_cast<std::uint32_t>(split->size()));
        for (const auto& s : *split) {
            w.i32(s.label);
            w.u32(static_cast<std::uint32_t>(s.position));
            w.f64(ds.spec.positions[s.position].phi());
            w.f64(ds.spec.positions[s.position].theta());
            for (double v : s.image.values) w.f64(v);
        }
    }
    w.save(path);
}

Dataset load_dataset(const std::filesystem::path& path) {
    auto r = ByteReader::open(path);
    if (r.bytes(4, "magic") != "OGDS") throw FormatError(path.string() + ": not a dataset cache (bad magic)");
    if (auto v = r.u32("version"); v != kDatasetCacheVersion) {
        throw FormatError(path.string() + ": dataset cache version " + std::to_string(v) + ", supported: " +
                          std::to_string(kDatasetCacheVersion));
    }
    const int w = static_cast<int>(r.u32("grid width"));
    const int h = static_cast<int>(r.u32("grid height"));
    EquirectGrid grid(w, h);
    DatasetSpec spec;
    spec.positions.clear();
    const auto np = r.u32("position count");
    for (std::uint32_t i = 0; i < np; ++i) {
        const double phi = r.f64("positions");
        const double theta = r.f64("positions");
        spec.positions.emplace_back(phi, theta);
    }
    spec.train = static_cast<int>(r.u32("split sizes"));
    spec.val = static_cast<int>(r.u32("split sizes"));
    spec.test = static_cast<int>(r.u32("split sizes"));
    spec.seed = r.u64("seed");
    spec.half_extent = r.f64("half extent");
    spec.classes.resize(r.u32("class count"));
    for (auto& c : spec.classes) c = r.i32("classes");

    Dataset ds{grid, spec, {}, {}, {}};
    for (auto* split : {&ds.train, &ds.val, &ds.test}) {
        const auto n = r.u32("sample count");
        for (std::uint32_t i = 0; i < n; ++i) {
            const int label = r.i32("sample label");
            const int pos = static_cast<int>(r.u32("sample position"));
            if (pos < 0 || static_cast<std::size_t>(pos) >= spec.positions.size()) {
                throw FormatError(path.string() + ": sample position index out of range");
            }
            r.f64("sample phi");
            r.f64("sample theta");
            std::vector<double> values(grid.size());
            for (auto& v : values) v = r.f64("sample values");
            split->push_back({EquirectImage(grid, std::move(values)), label, pos});
        }
    }
    if (!r.at_end()) throw FormatError(path.string() + ": trailing bytes after dataset");
    return ds;
}

}  // namespace omnigraph
