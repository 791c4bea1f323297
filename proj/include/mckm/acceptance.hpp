#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mckm {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    bool hard = true;  // informational checks report but never gate
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::filesystem::path data_dir = "data";
    std::function<void(const std::string&)> log;  // line sink; may be empty
};

/// Runs every release criterion and returns one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// True when every hard criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace mckm
