#include "mckm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace mckm {

Partition Dataset::label_partition() const {
    if (!has_labels()) throw std::logic_error("label_partition: dataset has no labels");
    int k = 0;
    for (int l : labels) {
        if (l < 1) throw std::logic_error("label_partition: labels must be >= 1");
        k = std::max(k, l);
    }
    return Partition{labels, k};
}

Dataset normalize(const Dataset& ds) {
    Dataset out = ds;
    const std::size_t n = ds.n(), p = ds.dim();
    for (std::size_t j = 0; j < p; ++j) {
        double lo = ds.points(0, j), hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, ds.points(i, j));
            hi = std::max(hi, ds.points(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < n; ++i)
            out.points(i, j) = range > 0.0 ? (ds.points(i, j) - lo) / range : 0.0;
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw std::invalid_argument("bad numeric value for " + what + ": '" + s + "'");
    return v;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
    const double v = parse_num(s, what);
    if (v < 1 || v != std::floor(v))
        throw std::invalid_argument(what + " must be a positive integer, got '" + s + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

GeneratorSpec parse_generator_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<std::string> kvs;
    if (colon != std::string::npos && colon + 1 < text.size())
        kvs = split(text.substr(colon + 1), ',');

    // entries are either key=value or bare values taken in the documented order
    auto each_kv = [&](std::initializer_list<const char*> order, auto&& fn) {
        std::size_t pos = 0;
        for (const auto& kv : kvs) {
            if (kv.empty()) continue;
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                if (pos >= order.size())
                    throw std::invalid_argument("too many generator values at '" + kv + "'");
                fn(*(order.begin() + pos++), kv);
            } else {
                fn(kv.substr(0, eq), kv.substr(eq + 1));
            }
        }
    };

    if (kind == "two-moons") {
        TwoMoonsSpec spec;
        each_kv({"n", "noise"}, [&](const std::string& k, const std::string& v) {
            if (k == "n") spec.n = parse_count(v, "n");
            else if (k == "noise") spec.noise = parse_num(v, "noise");
            else throw std::invalid_argument("unknown two-moons option '" + k + "'");
        });
        if (spec.n < 2) throw std::invalid_argument("two-moons needs n >= 2");
        if (spec.noise < 0) throw std::invalid_argument("two-moons noise must be >= 0");
        return spec;
    }
    if (kind == "gaussian-grid") {
        GaussianGridSpec spec;
        each_kv({"rows", "cols", "per", "sigma"}, [&](const std::string& k, const std::string& v) {
            if (k == "rows") spec.rows = parse_count(v, "rows");
            else if (k == "cols") spec.cols = parse_count(v, "cols");
            else if (k == "per") spec.per_cluster = parse_count(v, "per");
            else if (k == "sigma") spec.sigma = parse_num(v, "sigma");
            else throw std::invalid_argument("unknown gaussian-grid option '" + k + "'");
        });
        if (spec.sigma < 0) throw std::invalid_argument("gaussian-grid sigma must be >= 0");
        return spec;
    }
    if (kind == "unbalanced") {
        UnbalancedGaussiansSpec spec;
        double sigma = 0.1;
        std::vector<std::size_t> counts;
        each_kv({"counts", "sigma"}, [&](const std::string& k, const std::string& v) {
            if (k == "counts") {
                for (const auto& c : split(v, '/')) counts.push_back(parse_count(c, "counts"));
            } else if (k == "sigma") {
                sigma = parse_num(v, "sigma");
            } else {
                throw std::invalid_argument("unknown unbalanced option '" + k + "'");
            }
        });
        if (counts.empty()) throw std::invalid_argument("unbalanced needs counts=a/b/...");
        if (sigma < 0) throw std::invalid_argument("unbalanced sigma must be >= 0");
        // components sit on the unit circle, evenly spaced
        const std::size_t kc = counts.size();
        for (std::size_t j = 0; j < kc; ++j) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(kc);
            spec.components.push_back({counts[j], sigma, {std::cos(angle), std::sin(angle)}});
        }
        return spec;
    }
    throw std::invalid_argument("unknown generator '" + kind + "'");
}

std::string generator_name(const GeneratorSpec& spec) {
    std::ostringstream out;
    if (const auto* tm = std::get_if<TwoMoonsSpec>(&spec)) {
        out << "two-moons-" << tm->n;
    } else if (const auto* gg = std::get_if<GaussianGridSpec>(&spec)) {
        out << "gaussian-grid-" << gg->rows << "x" << gg->cols << "x" << gg->per_cluster;
    } else if (const auto* ub = std::get_if<UnbalancedGaussiansSpec>(&spec)) {
        out << "unbalanced";
        for (const auto& c : ub->components) out << "-" << c.count;
    }
    return out.str();
}

namespace {

Dataset generate_two_moons(const TwoMoonsSpec& spec, std::mt19937_64& rng) {
    const std::size_t n0 = spec.n / 2, n1 = spec.n - n0;
    Dataset ds;
    ds.points = Matrix(spec.n, 2);
    ds.labels.resize(spec.n);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::normal_distribution<double> noise(0.0, spec.noise > 0 ? spec.noise : 1.0);
    auto jitter = [&]() { return spec.noise > 0 ? noise(rng) : 0.0; };
    for (std::size_t i = 0; i < n0; ++i) {
        const double t = angle(rng);
        ds.points(i, 0) = std::cos(t) + jitter();
        ds.points(i, 1) = std::sin(t) + jitter();
        ds.labels[i] = 1;
    }
    for (std::size_t i = 0; i < n1; ++i) {
        const double t = angle(rng);
        ds.points(n0 + i, 0) = 1.0 - std::cos(t) + jitter();
        ds.points(n0 + i, 1) = 0.5 - std::sin(t) + jitter();
        ds.labels[n0 + i] = 2;
    }
    return ds;
}

Dataset generate_gaussian_grid(const GaussianGridSpec& spec, std::mt19937_64& rng) {
    const std::size_t k = spec.rows * spec.cols;
    const std::size_t n = k * spec.per_cluster;
    Dataset ds;
    ds.points = Matrix(n, 2);
    ds.labels.resize(n);
    std::normal_distribution<double> noise(0.0, spec.sigma > 0 ? spec.sigma : 1.0);
    std::size_t at = 0;
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
            const int label = static_cast<int>(r * spec.cols + c) + 1;
            const double cx = (static_cast<double>(c) + 0.5) / static_cast<double>(spec.cols);
            const double cy = (static_cast<double>(r) + 0.5) / static_cast<double>(spec.rows);
            for (std::size_t i = 0; i < spec.per_cluster; ++i, ++at) {
                ds.points(at, 0) = cx + (spec.sigma > 0 ? noise(rng) : 0.0);
                ds.points(at, 1) = cy + (spec.sigma > 0 ? noise(rng) : 0.0);
                ds.labels[at] = label;
            }
        }
    }
    return ds;
}

Dataset generate_unbalanced(const UnbalancedGaussiansSpec& spec, std::mt19937_64& rng) {
    if (spec.components.empty())
        throw std::invalid_argument("unbalanced generator needs at least one component");
    const std::size_t p = spec.components.front().center.size();
    std::size_t n = 0;
    for (const auto& c : spec.components) {
        if (c.center.size() != p)
            throw std::invalid_argument("unbalanced components must share a dimension");
        n += c.count;
    }
    Dataset ds;
    ds.points = Matrix(n, p);
    ds.labels.resize(n);
    std::size_t at = 0;
    int label = 1;
    for (const auto& comp : spec.components) {
        std::normal_distribution<double> noise(0.0, comp.sigma > 0 ? comp.sigma : 1.0);
        for (std::size_t i = 0; i < comp.count; ++i, ++at) {
            for (std::size_t j = 0; j < p; ++j)
                ds.points(at, j) = comp.center[j] + (comp.sigma > 0 ? noise(rng) : 0.0);
            ds.labels[at] = label;
        }
        ++label;
    }
    return ds;
}

}  // namespace

Dataset generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed) {
    auto rng = make_rng(seed);
    Dataset ds = std::visit(
        [&rng](const auto& s) -> Dataset {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TwoMoonsSpec>) return generate_two_moons(s, rng);
            else if constexpr (std::is_same_v<T, GaussianGridSpec>) return generate_gaussian_grid(s, rng);
            else return generate_unbalanced(s, rng);
        },
        spec);
    ds.name = generator_name(spec);
    return ds;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split(line, ',');
    bool has_label = !header.empty() && header.back() == "label";
    const std::size_t p = header.size() - (has_label ? 1 : 0);
    if (p == 0) throw std::runtime_error("csv has no feature columns: " + path.string());

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t n = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != header.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(header.size()) + " fields");
        try {
            for (std::size_t j = 0; j < p; ++j)
                values.push_back(parse_num(fields[j], "column " + std::to_string(j + 1)));
            if (has_label) {
                const double l = parse_num(fields[p], "label");
                if (l < 1 || l != std::floor(l))
                    throw std::invalid_argument("labels must be integers >= 1");
                labels.push_back(static_cast<int>(l));
            }
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ++n;
    }
    if (n == 0) throw std::runtime_error("csv has no data rows: " + path.string());

    Dataset ds;
    ds.points = Matrix(n, p);
    std::copy(values.begin(), values.end(), ds.points.data());
    ds.labels = std::move(labels);
    ds.name = path.stem().string();
    return ds;
}

void save_csv(const std::filesystem::path& path, const Dataset& ds) {
    std::string out;
    const std::size_t p = ds.dim();
    for (std::size_t j = 0; j < p; ++j) {
        if (j) out += ',';
        out += "x" + std::to_string(j + 1);
    }
    if (ds.has_labels()) out += ",label";
    out += '\n';
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            if (j) out += ',';
            out += format_double(ds.points(i, j));
        }
        if (ds.has_labels()) out += ',' + std::to_string(ds.labels[i]);
        out += '\n';
    }
    write_text_atomic(path, out);
}

void save_assignments_csv(const std::filesystem::path& path, const Partition& part) {
    std::string out = "index,cluster\n";
    for (std::size_t i = 0; i < part.assignments.size(); ++i)
        out += std::to_string(i + 1) + ',' + std::to_string(part.assignments[i]) + '\n';
    write_text_atomic(path, out);
}

Partition load_assignments_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    Partition part;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 2) throw std::runtime_error("bad assignment row: " + line);
        const int c = static_cast<int>(parse_num(fields[1], "cluster"));
        part.assignments.push_back(c);
        part.k = std::max(part.k, c);
    }
    return part;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mckm
