#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mckm/matrix.hpp"

namespace mckm {

/// Cluster ids are 1-based everywhere a partition crosses a module boundary.
struct Partition {
    std::vector<int> assignments;  // one id per sample, in [1, k]
    int k = 0;

    std::size_t size() const { return assignments.size(); }

    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
        for (int a : assignments) sizes[static_cast<std::size_t>(a - 1)]++;
        return sizes;
    }

    /// True when every id in [1, k] is used at least once and none is out of range.
    bool is_valid() const {
        if (k <= 0) return false;
        std::vector<char> seen(static_cast<std::size_t>(k), 0);
        for (int a : assignments) {
            if (a < 1 || a > k) return false;
            seen[static_cast<std::size_t>(a - 1)] = 1;
        }
        for (char s : seen)
            if (!s) return false;
        return true;
    }
};

struct Dataset {
    Matrix points;
    std::vector<int> labels;  // empty when no ground truth
    std::string name;

    std::size_t n() const { return points.rows(); }
    std::size_t dim() const { return points.cols(); }
    bool has_labels() const { return !labels.empty(); }

    Partition label_partition() const;
};

/// Per-feature min-max scaling to [0,1]; constant features map to 0.
Dataset normalize(const Dataset& ds);

struct TwoMoonsSpec {
    std::size_t n = 200;
    double noise = 0.05;
};

struct GaussianComponent {
    std::size_t count = 0;
    double sigma = 0.1;
    std::vector<double> center;
};

struct UnbalancedGaussiansSpec {
    std::vector<GaussianComponent> components;
};

struct GaussianGridSpec {
    std::size_t rows = 3;
    std::size_t cols = 5;
    std::size_t per_cluster = 50;
    double sigma = 0.01;
};

using GeneratorSpec = std::variant<TwoMoonsSpec, UnbalancedGaussiansSpec, GaussianGridSpec>;

/// Parses strings like
///   two-moons:n=200,noise=0.05
///   gaussian-grid:rows=3,cols=5,per=50,sigma=0.01
///   unbalanced:counts=500/100/30,sigma=0.1
GeneratorSpec parse_generator_spec(const std::string& text);

std::string generator_name(const GeneratorSpec& spec);

Dataset generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed);

/// CSV with header x1,...,xp[,label]; label column optional, values 1..k.
Dataset load_csv(const std::filesystem::path& path);
void save_csv(const std::filesystem::path& path, const Dataset& ds);

void save_assignments_csv(const std::filesystem::path& path, const Partition& part);
Partition load_assignments_csv(const std::filesystem::path& path);

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

/// Writes via a temporary file in the same directory, then renames.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mckm
