// Exercises the C API surface through the shared library only.
#include "ihall.h"

#include <cstdio>
#include <cstring>
#include <string>

static int failures = 0;
#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            std::fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                  \
        }                                                                \
    } while (0)

int main() {
    // invalid configuration is rejected with an error code
    ihall_engine_t* bad = nullptr;
    CHECK(ihall_engine_create("q=4\nweights=2,2\n", &bad) == IHALL_ERR_INVALID);
    CHECK(ihall_engine_create("weights=4\nq=2\n", &bad) == IHALL_ERR_INVALID);

    ihall_engine_t* e = nullptr;
    CHECK(ihall_engine_create("q=2\nweights=2,1\ncaps.index_grid=1\ncaps.max_series=1\n", &e) ==
          IHALL_OK);
    CHECK(e != nullptr);

    // generator dumps
    CHECK(ihall_dump_generator(e, "*", "Theta", 0) == IHALL_OK);
    std::string t0 = ihall_dump_text(e);
    CHECK(t0.find("sqrt(2)") != std::string::npos);  // 1/(v - v^-1) = sqrt(2) at q=2
    CHECK(ihall_dump_generator(e, "1,1", "B", -1) == IHALL_OK);
    std::string b = ihall_dump_text(e);
    CHECK(b.find("-1 ;") == 0);  // single term with coefficient -1
    CHECK(ihall_dump_generator(e, "9,9", "B", 0) == IHALL_ERR_INVALID);
    CHECK(std::strlen(ihall_last_error(e)) > 0);

    // a small suite runs clean
    int fails = -1;
    CHECK(ihall_run_suite(e, "relations:star", &fails) == IHALL_OK);
    CHECK(fails == 0);
    std::string report = ihall_report(e);
    CHECK(report.find("status=holds") != std::string::npos);
    CHECK(report.find("failures=0") != std::string::npos);

    // reports are reproducible
    CHECK(ihall_run_suite(e, "relations:star", &fails) == IHALL_OK);
    CHECK(report == ihall_report(e));

    ihall_engine_destroy(e);
    if (failures == 0) std::printf("capi: all checks passed\n");
    return failures == 0 ? 0 : 1;
}
