// Runs the release criteria end to end and fails if any hard one fails.
#include <cstdio>

#include "mckm/acceptance.hpp"

int main() {
    mckm::AcceptanceOptions opts;
    opts.data_dir = MCKM_DATA_DIR;
    opts.log = [](const std::string& line) {
        std::puts(line.c_str());
        std::fflush(stdout);
    };
    const auto results = mckm::run_acceptance(opts);
    const bool ok = mckm::all_passed(results);
    std::printf("%zu criteria, %s\n", results.size(), ok ? "all passed" : "FAILURES above");
    return ok ? 0 : 1;
}
