// Batch front end over the C API: configuration, suite selection, report
// emission, generator dumps.
#include "ihall.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"iHall algebra verification engine"};
    std::string config_path, suite, weights, out_path, dump_spec, lambda;
    long q = 0, max_index = 0, seed = -1;
    bool oracle = false;
    app.add_option("--config", config_path, "configuration file (key=value lines)");
    app.add_option("--suite", suite, "suite: relations[:star|:tube], lemmas, theorem-b, oracles, "
                                     "associativity, negative-control, all");
    app.add_option("--q", q, "ground field size (non-square prime power)");
    app.add_option("--weights", weights, "weight type, e.g. 2,2");
    app.add_option("--lambda", lambda, "branch coordinates for branches 4..t");
    app.add_option("--max-index", max_index, "series/index grid bound");
    app.add_option("--out", out_path, "report output path");
    app.add_option("--seed", seed, "seed for sampled associativity triples");
    app.add_flag("--oracle", oracle, "force brute-force cross-checks on");
    app.add_option("--dump", dump_spec, "dump one generator: VERTEX:KIND:INDEX, e.g. '1,1:B:-1'");
    CLI11_PARSE(app, argc, argv);

    std::ostringstream cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read config file " << config_path << "\n";
            return 2;
        }
        cfg << in.rdbuf() << "\n";
    }
    if (q) cfg << "q=" << q << "\n";
    if (!weights.empty()) cfg << "weights=" << weights << "\n";
    if (!lambda.empty()) cfg << "lambda=" << lambda << "\n";
    if (max_index) cfg << "caps.index_grid=" << max_index << "\ncaps.max_series=" << max_index << "\n";
    if (seed >= 0) cfg << "seed=" << seed << "\n";
    if (oracle) cfg << "oracle=1\n";
    if (!suite.empty()) cfg << "suite=" << suite << "\n";

    ihall_engine_t* engine = nullptr;
    ihall_status_t st = ihall_engine_create(cfg.str().c_str(), &engine);
    if (st != IHALL_OK) {
        std::cerr << "configuration error\n";
        return 2;
    }

    int rc = 0;
    if (!dump_spec.empty()) {
        auto c1 = dump_spec.find(':');
        auto c2 = dump_spec.rfind(':');
        if (c1 == std::string::npos || c2 == c1) {
            std::cerr << "dump spec must be VERTEX:KIND:INDEX\n";
            rc = 2;
        } else {
            std::string vx = dump_spec.substr(0, c1);
            std::string kind = dump_spec.substr(c1 + 1, c2 - c1 - 1);
            long index = std::stol(dump_spec.substr(c2 + 1));
            st = ihall_dump_generator(engine, vx.c_str(), kind.c_str(), index);
            if (st != IHALL_OK) {
                std::cerr << "dump failed: " << ihall_last_error(engine) << "\n";
                rc = 2;
            } else {
                std::cout << ihall_dump_text(engine);
            }
        }
        ihall_engine_destroy(engine);
        return rc;
    }

    int failures = 0;
    st = ihall_run_suite(engine, suite.empty() ? "all" : suite.c_str(), &failures);
    if (st != IHALL_OK) {
        std::cerr << "run failed: " << ihall_last_error(engine) << "\n";
        ihall_engine_destroy(engine);
        return 2;
    }
    if (!out_path.empty()) {
        if (ihall_report_to_file(engine, out_path.c_str()) != IHALL_OK) {
            std::cerr << "cannot write report: " << ihall_last_error(engine) << "\n";
            rc = 2;
        }
    } else {
        std::cout << ihall_report(engine);
    }
    if (failures > 0) rc = 1;
    ihall_engine_destroy(engine);
    return rc;
}
