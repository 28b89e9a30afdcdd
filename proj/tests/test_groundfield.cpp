#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ihall/groundfield.hpp"

using namespace ihall;

TEST_CASE("prime and extension field tables satisfy field axioms") {
    for (long q : {2L, 3L, 8L}) {
        GroundField G(q, 2);
        for (int d : {1, 2}) {
            const FieldTable& F = G.extension_field(d);
            int n = F.size();
            CHECK(n == (int)[&] { long r = 1; for (int i = 0; i < d; ++i) r *= q; return r; }());
            for (int a = 0; a < n; ++a) {
                CHECK(F.add(a, 0) == a);
                CHECK(F.mul(a, 1) == a);
                CHECK(F.add(a, F.neg(a)) == 0);
                if (a) CHECK(F.mul(a, F.inv(a)) == 1);
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < std::min(n, 5); ++c) {
                        CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
                        CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
                    }
            }
            // multiplicative group has order n-1
            int g = 0;
            for (int a = 1; a < n; ++a) {
                int x = a, ord = 1;
                while (x != 1) { x = F.mul(x, a); ++ord; }
                if (ord == n - 1) { g = a; break; }
            }
            CHECK(g != 0);
        }
    }
}

TEST_CASE("irreducible tables") {
    GroundField G(2, 2);
    CHECK(G.irreducibles(1).size() == 2);  // z, z+1
    CHECK(G.irreducibles(2).size() == 1);  // z^2+z+1
    CHECK(G.irreducibles(3).size() == 2);
    CHECK(G.irreducibles(4).size() == 3);
    GroundField G3(3, 2);
    CHECK(G3.irreducibles(1).size() == 3);
    CHECK(G3.irreducibles(2).size() == 3);
    CHECK(G3.irreducibles(3).size() == 8);
}

TEST_CASE("number of degree-1 closed points is q+1") {
    for (long q : {2L, 3L, 5L}) {
        GroundField G(q, 2);
        CHECK(G.closed_points(1).size() == (size_t)(q + 1));
    }
}

TEST_CASE("binary form factorization") {
    GroundField G(2, 2);
    SUBCASE("y1*y2 splits into the two marked points") {
        // y1*y2: coefficients of y1^2, y1 y2, y2^2 are 0,1,0
        auto f = G.factor_binary_form({0, 1, 0});
        REQUIRE(f.size() == 2);
        // one factor at infinity (branch 1, the y1 factor), one at z=0 (branch 2)
        bool inf = false, zero = false;
        for (auto& [p, m] : f) {
            CHECK(m == 1);
            CHECK(p.exceptional);
            if (p.branch == 1) inf = true;
            if (p.branch == 2) zero = true;
        }
        CHECK(inf);
        CHECK(zero);
    }
    SUBCASE("y1^2 + y1 y2 + y2^2 is one ordinary point of degree 2") {
        auto f = G.factor_binary_form({1, 1, 1});
        REQUIRE(f.size() == 1);
        CHECK_FALSE(f[0].first.exceptional);
        CHECK(f[0].first.deg == 2);
        CHECK(f[0].second == 1);
    }
    SUBCASE("degree-weighted multiplicities sum to the form degree") {
        for (int m = 1; m <= 4; ++m) {
            long total = 1;
            for (int i = 0; i <= m; ++i) total *= 2;
            for (long code = 1; code < total; ++code) {
                std::vector<int> c(m + 1);
                long x = code;
                for (int i = 0; i <= m; ++i) { c[i] = (int)(x % 2); x /= 2; }
                int sum = 0;
                for (auto& [p, mult] : G.factor_binary_form(c)) sum += p.deg * mult;
                CHECK(sum == m);
            }
        }
    }
    SUBCASE("y2^3 over F_3 is the triple point z = 0") {
        GroundField G3(3, 2);
        auto f = G3.factor_binary_form({0, 0, 0, 1});
        REQUIRE(f.size() == 1);
        CHECK(f[0].first.exceptional);
        CHECK(f[0].first.branch == 2);
        CHECK(f[0].second == 3);
    }
}

TEST_CASE("coprime pair counts match the closed formulas") {
    // t(a,b) = (q-1)(q^(b+1)-1) if a=0, else (q-1)^2 q^(a+b)
    for (long q : {2L, 3L}) {
        GroundField G(q, 2);
        auto formula = [&](int a, int b) {
            auto p = [&](int e) { long r = 1; for (int i = 0; i < e; ++i) r *= q; return r; };
            if (a == 0) return (q - 1) * (p(b + 1) - 1);
            return (q - 1) * (q - 1) * p(a + b);
        };
        for (int a = 0; a + 0 <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b)
                CHECK(G.count_coprime_pairs(a, b, true) == formula(a, b));
    }
}

TEST_CASE("t(0,1) and t(1,1) at q=2") {
    GroundField G(2, 2);
    CHECK(G.count_coprime_pairs(0, 1, true) == 3);   // (q-1)(q^2-1)
    CHECK(G.count_coprime_pairs(1, 1, true) == 4);   // (q-1)^2 q^2
}

TEST_CASE("branch parameter validation") {
    CHECK_THROWS(GroundField(2, 3));        // t <= q violated
    CHECK_NOTHROW(GroundField(3, 3));       // lambda_3 = 1
    CHECK_THROWS(GroundField(3, 4));        // no room for lambda_4 in F_3 \ {0,1}
    CHECK_NOTHROW(GroundField(5, 4));
    GroundField G(5, 4);
    CHECK(G.branch_coordinate(2) == 0);
    CHECK(G.branch_coordinate(3) == 1);
    CHECK(G.branch_coordinate(4) == 2);
}
