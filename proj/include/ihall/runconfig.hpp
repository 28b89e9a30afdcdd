#pragma once

#include "ihall/verifier.hpp"

#include <string>
#include <vector>

namespace ihall {

// Batch-run configuration. Parsed from a flat key=value text (one pair per
// line) with the keys: weights, lambda, q, caps.torsion_len, caps.line_count,
// caps.index_grid, caps.max_series, caps.hom_budget, suite, seed, out.
struct RunConfig {
    long q = 2;
    std::vector<int> weights = {1, 1};
    std::vector<int> lambda;  // coordinates of branches 4..t
    Caps caps;
    std::string suite = "all";
    std::string out;
    unsigned long seed = 1;
    bool force_oracle = false;

    static RunConfig parse(const std::string& text);
    std::string echo() const;  // canonical key=value dump
    void validate() const;
};

struct RunResult {
    std::vector<VerifyRecord> records;
    int failures = 0;
    int holds = 0;
    int consumed = 0;
    int skipped = 0;
    std::string report;  // deterministic text body
};

// Execute the selected suites against a fresh engine.
RunResult run_suites(const RunConfig& cfg);

// Deterministic element dump of a generator: vertex "*" or "i,j", kind in
// {"B", "Theta", "H"}.
std::string dump_generator(const RunConfig& cfg, const std::string& vertex, const std::string& kind,
                           long index);

}  // namespace ihall
