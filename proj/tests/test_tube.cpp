#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ihall/groundfield.hpp"
#include "ihall/tube.hpp"

using namespace ihall;

namespace {
GroundField G2(2, 2), G3(3, 2);
}

TEST_CASE("classify is a left inverse of model") {
    for (int n : {1, 2, 3}) {
        Tube T(G2.field(), n);
        std::vector<int> bound(n, n == 1 ? 4 : 3);
        for (const auto& c : T.classes_with_dim_at_most(bound)) {
            CHECK(T.classify(T.model(c)) == c);
        }
    }
}

TEST_CASE("hom dimensions in small tubes") {
    Tube T3(G2.field(), 3);
    auto S = [&](int j, int a) { return TubeClass::uniserial(j, a, 3); };
    CHECK(T3.hom_dim(S(1, 1), S(2, 1)) == 0);  // distinct simples
    CHECK(T3.hom_dim(S(1, 1), S(1, 1)) == 1);
    Tube TJ(G2.field(), 1);
    auto J = [&](int a) { return TubeClass::uniserial(0, a, 1); };
    // End(F_q[t]/t^2) has basis 1, t
    CHECK(TJ.hom_dim(J(2), J(2)) == 2);
    CHECK(TJ.hom_dim(J(2), J(3)) == 2);
    CHECK(TJ.hom_dim(J(1), J(3)) == 1);
    // Jordan: hom(S^(a), S^(b)) = min(a,b)
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b) CHECK(TJ.hom_dim(J(a), J(b)) == std::min(a, b));
}

TEST_CASE("ext via euler form") {
    Tube T2(G2.field(), 2);
    auto S = [&](int j, int a) { return TubeClass::uniserial(j, a, 2); };
    CHECK(T2.ext_dim(S(1, 1), S(1, 1)) == 0);
    CHECK(T2.ext_dim(S(1, 1), S(0, 1)) == 1);
    Tube TJ(G3.field(), 1);
    auto J = [&](int a) { return TubeClass::uniserial(0, a, 1); };
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b) CHECK(TJ.ext_dim(J(a), J(b)) == std::min(a, b));
}

TEST_CASE("lem:HomExt closed forms at q=2") {
    // in the tube C_p: S_{1,0}^{(up-1)} has top 0, S_{1,1}^{(up+1)} top 1
    for (int p : {2, 3}) {
        Tube T(G2.field(), p);
        long q = 2;
        for (int u = 1; u <= 3; ++u) {
            auto s0 = TubeClass::uniserial(0, u * p - 1, p);
            auto s1 = TubeClass::uniserial(1, u * p + 1, p);
            // |Aut(S_0^(up-1))| = q^(u-1)(q-1), |Aut(S_1^(up+1))| = q^u (q-1)
            mpz_class a0 = T.aut_order(s0), a1 = T.aut_order(s1);
            mpz_class e0 = 1, e1 = 1;
            mpz_pow_ui(e0.get_mpz_t(), mpz_class(q).get_mpz_t(), u - 1);
            mpz_pow_ui(e1.get_mpz_t(), mpz_class(q).get_mpz_t(), u);
            CHECK(a0 == e0 * (q - 1));
            CHECK(a1 == e1 * (q - 1));
            // hom counts against S_{1,0}^{(lambda)} for small partitions
            for (int l1 = 1; l1 <= 2; ++l1)
                for (int l2 = 0; l2 <= l1; ++l2) {
                    TubeClass lam;
                    lam.add_part(0, l1 * p, p);
                    if (l2) lam.add_part(0, l2 * p, p);
                    // |Hom(S_{1,1}^(up+1), S_{1,0}^(lam))| = q^(sum min(i,u+1) l_i)
                    long expo = std::min(l1, u + 1) + (l2 ? std::min(l2, u + 1) : 0);
                    CHECK(T.hom_dim(s1, lam) == expo);
                    // |Hom(S_{1,0}^(lam), S_{1,1}^(up+1))| = q^(sum min(i,u) l_i)
                    long expo2 = std::min(l1, u) + (l2 ? std::min(l2, u) : 0);
                    CHECK(T.hom_dim(lam, s1) == expo2);
                    CHECK(T.hom_dim(s0, lam) == std::min(l1, u - 1) + (l2 ? std::min(l2, u - 1) : 0));
                    CHECK(T.hom_dim(lam, s0) == expo2);
                }
        }
    }
}

TEST_CASE("eq:aut for homogeneous partitions") {
    // |Aut(S^(lambda))| = q^(|lambda| + sum_i i l_i (l_i - 1) + 2 sum_{i<j} i l_i l_j)
    //                     * prod_i (1 - q^-1) ... (1 - q^-l_i)
    for (long q : {2L, 3L}) {
        const FieldTable& F = (q == 2 ? G2 : G3).field();
        Tube T(F, 1);
        std::vector<std::vector<int>> partitions = {
            {1}, {2}, {1, 1}, {3}, {2, 1}, {1, 1, 1}, {4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
        for (auto& lam : partitions) {
            TubeClass c;
            for (int part : lam) c.add_part(0, part, 1);
            // multiplicities l_i of part size i
            std::map<int, int> l;
            for (int part : lam) l[part] += 1;
            long expo = 0;
            for (int part : lam) expo += part;  // |lambda|
            for (auto& [i, li] : l) expo += (long)i * li * (li - 1);
            for (auto& [i, li] : l)
                for (auto& [j, lj] : l)
                    if (i < j) expo += 2L * i * li * lj;
            mpz_class expected;
            mpz_pow_ui(expected.get_mpz_t(), mpz_class(q).get_mpz_t(), expo);
            // prod over i of (1-q^-1)...(1-q^-l_i) times q^expo stays integral:
            // multiply as exact rationals
            mpq_class factor = 1;
            for (auto& [i, li] : l)
                for (int v = 1; v <= li; ++v) {
                    mpz_class qv;
                    mpz_pow_ui(qv.get_mpz_t(), mpz_class(q).get_mpz_t(), v);
                    factor *= mpq_class(qv - 1) / mpq_class(qv);
                }
            mpq_class full = mpq_class(expected) * factor;
            full.canonicalize();
            REQUIRE(full.get_den() == 1);
            CHECK(T.aut_order(c) == full.get_num());
        }
    }
}

TEST_CASE("aut order brute force agreement") {
    // all classes of total length <= 3 on C_2 and Jordan at q=2
    for (int n : {1, 2}) {
        Tube T(G2.field(), n);
        std::vector<int> bound(n, 3);
        for (const auto& c : T.classes_with_dim_at_most(bound)) {
            if (c.total_length() > 3) continue;
            CHECK(T.aut_order(c) == T.aut_order_brute(c));
        }
    }
}

TEST_CASE("hall numbers, basic") {
    Tube TJ(G2.field(), 1);
    auto J = [&](int a) { return TubeClass::uniserial(0, a, 1); };
    TubeClass SS;
    SS.add_part(0, 1, 1).add_part(0, 1, 1);
    // unique length-1 submodule of the uniserial
    CHECK(TJ.hall_number(J(2), J(1), J(1)) == 1);
    // lines in F_2^2: q + 1 = 3
    CHECK(TJ.hall_number(SS, J(1), J(1)) == 3);
    // K_0 additivity: zero when classes mismatch
    CHECK(TJ.hall_number(J(3), J(1), J(1)) == 0);
    // |Aut(S+S)| at q=2 equals |GL_2(F_2)| = 6
    CHECK(TJ.aut_order(SS) == 6);
}

TEST_CASE("ext middles: cocycle route vs Riedtmann-Peng route") {
    for (int n : {1, 2}) {
        Tube T(G2.field(), n);
        std::vector<int> bound(n, n == 1 ? 4 : 2);
        auto classes = T.classes_with_dim_at_most(bound);
        for (const auto& M : classes)
            for (const auto& N : classes) {
                if (M.total_length() + N.total_length() > 4) continue;
                if (M.total_length() == 0 || N.total_length() == 0) continue;
                auto mids = T.ext_middles(M, N);
                long total = 0;
                for (auto& [L, cnt] : mids) {
                    CHECK(mpz_class(cnt) == T.ext_count_with_middle(M, N, L));
                    total += cnt;
                }
                // sum over middles is |Ext^1(M,N)| = q^ext
                long expect = 1;
                for (long i = 0; i < T.ext_dim(M, N); ++i) expect *= 2;
                CHECK(total == expect);
            }
    }
}

TEST_CASE("phi/psi table") {
    // phi_{a,b} = psi_{b,a} = q if a<b, 1 if a>b, q+1 if a=b
    long q = 2;
    int p = 2;
    Tube T(G2.field(), p);
    auto S0 = [&](int len) { return TubeClass::uniserial(0, len, p); };
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) {
            long expect = a < b ? q : (a > b ? 1 : q + 1);
            // phi via the Riedtmann-Peng ext count
            TubeClass M;
            M.add_part(0, a * p - 1, p).add_part(0, b * p - 1, p);
            TubeClass L;
            L.add_part(0, a * p - 1, p).add_part(0, b * p, p);
            mpz_class phi = T.ext_count_with_middle(M, TubeClass::uniserial(1, 1, p), L);
            CHECK(phi == (q - 1) * expect);
            // psi via a direct submodule count
            TubeClass Lp;
            Lp.add_part(0, a * p - 1, p).add_part(0, b * p - 1, p);
            TubeClass Mp;
            Mp.add_part(0, a * p - 1, p);
            if (b >= 2) Mp.add_part(0, (b - 1) * p, p);
            long psi = T.hall_number(Lp, Mp, S0(p - 1));
            long expect_ba = b < a ? q : (b > a ? 1 : q + 1);
            CHECK(psi == expect_ba);
        }
}

TEST_CASE("sum of ext middle counts with fixed part count (Lemma B.4 shape)") {
    // sum over [N] with l(N) = l(M)+1 of |Ext^1(M, S_0^(an-1))_N|
    //   = |Hom(M, S_0^(an-1))| / |Hom(M, S_0^(n-1))|
    for (int n : {2, 3}) {
        Tube T(G2.field(), n);
        long q = 2;
        // M in perp(S): indecomposables S_0^(an), S_1^(an), S_0^(an-1), S_1^(bn+1)
        std::vector<TubeClass> Ms;
        Ms.push_back(TubeClass::uniserial(0, n, n));
        Ms.push_back(TubeClass::uniserial(1, 1, n));
        Ms.push_back(TubeClass::uniserial(0, n - 1, n));
        {
            TubeClass m2;
            m2.add_part(0, n, n).add_part(0, n - 1, n);
            Ms.push_back(m2);
        }
        for (int a = 1; a <= 2; ++a) {
            auto target = TubeClass::uniserial(0, a * n - 1, n);
            for (const auto& M : Ms) {
                if (M.num_parts() > 2) continue;
                mpz_class lhs = 0;
                for (auto& [N, cnt] : T.ext_middles(M, target))
                    if (N.num_parts() == M.num_parts() + 1) lhs += cnt;
                long e1 = T.hom_dim(M, target);
                long e2 = T.hom_dim(M, TubeClass::uniserial(0, n - 1, n));
                mpz_class rhs;
                mpz_pow_ui(rhs.get_mpz_t(), mpz_class(q).get_mpz_t(), (unsigned long)(e1 - e2));
                CHECK(lhs == rhs);
            }
        }
    }
}

TEST_CASE("socle") {
    Tube T(G2.field(), 3);
    auto c = TubeClass::uniserial(1, 2, 3);  // top 1, socle 0
    CHECK(T.socle(c) == std::vector<int>{0});
    TubeClass d;
    d.add_part(2, 3, 3).add_part(1, 1, 3);  // socles 0 and 1
    auto s = T.socle(d);
    CHECK(s == std::vector<int>{0, 1});
}
