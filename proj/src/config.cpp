#include "omnigraph/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "omnigraph/error.hpp"

namespace omnigraph {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const auto s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw UsageError("config key '" + key + "': cannot parse '" + text + "'");
    }
    return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(key, item));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_floating_point_v<T>) {
            s += fmt(v[i]);
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s;
}

struct Field {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define INT_FIELD(name, member)                                                                  \
    Field {                                                                                      \
        name, [](RunConfig& c, const std::string& v) { c.member = parse_number<int>(name, v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); }                          \
    }
#define DOUBLE_FIELD(name, member)                                                                  \
    Field {                                                                                         \
        name, [](RunConfig& c, const std::string& v) { c.member = parse_number<double>(name, v); }, \
            [](const RunConfig& c) { return fmt(c.member); }                                        \
    }
#define U64_FIELD(name, member)                                                                            \
    Field {                                                                                                \
        name, [](RunConfig& c, const std::string& v) { c.member = parse_number<std::uint64_t>(name, v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); }                                    \
    }
#define STRING_FIELD(name, member)                                                  \
    Field {                                                                         \
        name, [](RunConfig& c, const std::string& v) { c.member = trim(v); },       \
            [](const RunConfig& c) { return c.member; }                             \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        INT_FIELD("grid_width", grid_width),
        INT_FIELD("grid_height", grid_height),
        {"graph", [](RunConfig& c, const std::string& v) {
             try {
                 c.graph = parse_graph_mode(trim(v));
             } catch (const DomainError& e) {
                 throw UsageError(std::string("config key 'graph': ") + e.what());
             }
         },
         [](const RunConfig& c) { return std::string(to_string(c.graph)); }},
        INT_FIELD("j1", net.j1),
        INT_FIELD("j2", net.j2),
        INT_FIELD("degree", net.degree),
        INT_FIELD("p1", net.p1),
        INT_FIELD("p2", net.p2),
        INT_FIELD("scales", net.scales),
        {"fc", [](RunConfig& c, const std::string& v) { c.net.fc = parse_list<int>("fc", v); },
         [](const RunConfig& c) { return join(c.net.fc); }},
        INT_FIELD("classes", net.classes),
        DOUBLE_FIELD("learning_rate", net.learning_rate),
        DOUBLE_FIELD("beta1", net.beta1),
        DOUBLE_FIELD("beta2", net.beta2),
        DOUBLE_FIELD("epsilon", net.epsilon),
        INT_FIELD("batch_size", net.batch_size),
        INT_FIELD("epochs", net.epochs),
        U64_FIELD("seed", net.seed),
        {"positions",
         [](RunConfig& c, const std::string& v) {
             std::vector<SphericalPoint> pos;
             for (const auto& item : split(v, ',')) {
                 const auto parts = split(item, ':');
                 if (parts.size() != 2) throw UsageError("config key 'positions': expected phi:theta, got '" + item + "'");
                 try {
                     pos.emplace_back(parse_number<double>("positions", parts[0]),
                                      parse_number<double>("positions", parts[1]));
                 } catch (const DomainError& e) {
                     throw UsageError(std::string("config key 'positions': ") + e.what());
                 }
             }
             c.data.positions = std::move(pos);
         },
         [](const RunConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.data.positions.size(); ++i) {
                 if (i) s += ',';
                 s += fmt(c.data.positions[i].phi()) + ":" + fmt(c.data.positions[i].theta());
             }
             return s;
         }},
        {"digits", [](RunConfig& c, const std::string& v) { c.data.classes = parse_list<int>("digits", v); },
         [](const RunConfig& c) { return join(c.data.classes); }},
        INT_FIELD("train", data.train),
        INT_FIELD("val", data.val),
        INT_FIELD("test", data.test),
        U64_FIELD("data_seed", data.seed),
        DOUBLE_FIELD("half_extent", data.half_extent),
        STRING_FIELD("images", images),
        STRING_FIELD("labels", labels),
        STRING_FIELD("run_dir", run_dir),
        STRING_FIELD("dataset_cache", dataset_cache),
        STRING_FIELD("checkpoint", checkpoint),
        {"phis", [](RunConfig& c, const std::string& v) { c.phis = parse_list<double>("phis", v); },
         [](const RunConfig& c) { return join(c.phis); }},
        {"dthetas", [](RunConfig& c, const std::string& v) { c.dthetas = parse_list<double>("dthetas", v); },
         [](const RunConfig& c) { return join(c.dthetas); }},
        INT_FIELD("residual_patterns", residual_patterns),
        U64_FIELD("residual_seed", residual_seed),
        INT_FIELD("fm_layer", fm_layer),
        {"fm_filters", [](RunConfig& c, const std::string& v) { c.fm_filters = parse_list<int>("fm_filters", v); },
         [](const RunConfig& c) { return join(c.fm_filters); }},
        INT_FIELD("fm_sample", fm_sample),
    };
    return f;
}

#undef INT_FIELD
#undef DOUBLE_FIELD
#undef U64_FIELD
#undef STRING_FIELD

}  // namespace

std::filesystem::path RunConfig::checkpoint_path() const {
    return checkpoint.empty() ? std::filesystem::path(run_dir) / "checkpoint.bin" : std::filesystem::path(checkpoint);
}

bool RunConfig::operator==(const RunConfig& o) const { return serialize_config(*this) == serialize_config(o); }

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(cfg, value);
            return;
        }
    }
    throw UsageError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
    RunConfig cfg = base;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        try {
            set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const UsageError& e) {
            throw UsageError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

}  // namespace omnigraph
