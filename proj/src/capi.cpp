#include "ihall.h"

#include "ihall/runconfig.hpp"

#include <fstream>
#include <sstream>
#include <string>

struct ihall_engine {
    ihall::RunConfig cfg;
    std::string report;
    std::string dump;
    std::string error;
};

namespace {

ihall_status_t guard(ihall_engine* e, const std::function<void()>& body) {
    try {
        body();
        return IHALL_OK;
    } catch (const std::invalid_argument& ex) {
        if (e) e->error = ex.what();
        return IHALL_ERR_INVALID;
    } catch (const std::runtime_error& ex) {
        if (e) e->error = ex.what();
        return IHALL_ERR_UNSUPPORTED;
    } catch (const std::exception& ex) {
        if (e) e->error = ex.what();
        return IHALL_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

ihall_status_t ihall_engine_create(const char* config_text, ihall_engine_t** out) {
    if (!config_text || !out) return IHALL_ERR_INVALID;
    auto* e = new ihall_engine();
    ihall_status_t st = guard(e, [&] { e->cfg = ihall::RunConfig::parse(config_text); });
    if (st != IHALL_OK) {
        delete e;
        return st;
    }
    *out = e;
    return IHALL_OK;
}

ihall_status_t ihall_engine_create_from_file(const char* path, ihall_engine_t** out) {
    if (!path || !out) return IHALL_ERR_INVALID;
    std::ifstream in(path);
    if (!in) return IHALL_ERR_INVALID;
    std::stringstream ss;
    ss << in.rdbuf();
    return ihall_engine_create(ss.str().c_str(), out);
}

void ihall_engine_destroy(ihall_engine_t* e) { delete e; }

const char* ihall_last_error(const ihall_engine_t* e) { return e ? e->error.c_str() : ""; }

ihall_status_t ihall_run_suite(ihall_engine_t* e, const char* suite, int* failures) {
    if (!e || !suite) return IHALL_ERR_INVALID;
    return guard(e, [&] {
        ihall::RunConfig cfg = e->cfg;
        cfg.suite = suite;
        ihall::RunResult res = ihall::run_suites(cfg);
        e->report = res.report;
        if (failures) *failures = res.failures;
    });
}

const char* ihall_report(const ihall_engine_t* e) { return e ? e->report.c_str() : ""; }

ihall_status_t ihall_report_to_file(ihall_engine_t* e, const char* path) {
    if (!e || !path) return IHALL_ERR_INVALID;
    return guard(e, [&] {
        std::ofstream out(path);
        if (!out) throw std::invalid_argument(std::string("cannot open ") + path);
        out << e->report;
    });
}

ihall_status_t ihall_dump_generator(ihall_engine_t* e, const char* vertex, const char* kind,
                                    long index) {
    if (!e || !vertex || !kind) return IHALL_ERR_INVALID;
    return guard(e, [&] { e->dump = ihall::dump_generator(e->cfg, vertex, kind, index); });
}

const char* ihall_dump_text(const ihall_engine_t* e) { return e ? e->dump.c_str() : ""; }

}  // extern "C"
