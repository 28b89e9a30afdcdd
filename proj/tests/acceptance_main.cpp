// Acceptance suite: one pass/fail line per criterion. Every check is an
// exact equality; the stated wall-clock budget per criterion is enforced.
#include "ihall/runconfig.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

using namespace ihall;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& name, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto t0 = Clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        ok = false;
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool in_time = secs < budget_seconds;
    bool pass = ok && in_time;
    if (!pass) ++g_failures;
    std::printf("AC%-2d %-34s %s (%.1fs%s)%s%s\n", num, name.c_str(), pass ? "PASS" : "FAIL", secs,
                in_time ? "" : " OVER BUDGET", detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

// ---- AC3 helper: independent Riedtmann-Peng product oracle --------------
// [A]*[B] assembled purely from hall_number, aut_order and hom_dim:
//   #{f : ker = N, coker = L, im = I} = F^A_{I,N} F^B_{L,I} |Aut I|
HallElt oracle_tube_product(Engine& E, const Tube& T, const PointId& pt, const TubeClass& A,
                            const TubeClass& B) {
    const Ctx& c = E.ctx();
    long q = c.q;
    int n = T.rank();
    auto k0_of = [&](const TubeClass& tc) {
        K0Class k = K0Class::zero(c);
        for (auto& [top, len] : tc.parts) k = k + K0Class::uniserial(c, pt.branch, top, len);
        return k;
    };
    long euler_k = T.euler(A, B);
    HallElt out(q);
    auto dA = A.dim_vector(n), dB = B.dim_vector(n);
    std::vector<int> bound(n);
    for (int j = 0; j < n; ++j) bound[j] = std::min(dA[j], dB[j]);
    for (auto& I : T.classes_with_dim_at_most(bound)) {
        auto dI = I.dim_vector(n);
        std::vector<int> dN(n), dL(n);
        for (int j = 0; j < n; ++j) {
            dN[j] = dA[j] - dI[j];
            dL[j] = dB[j] - dI[j];
        }
        mpz_class autI = T.aut_order(I);
        for (auto& N : T.classes_with_dim(dN)) {
            long FA = T.hall_number(A, I, N);
            if (!FA) continue;
            for (auto& L : T.classes_with_dim(dL)) {
                long FB = T.hall_number(B, L, I);
                if (!FB) continue;
                mpz_class count = mpz_class(FA) * FB * autI;
                long ext = T.ext_dim(N, L);
                Scalar coeff = v_power(-euler_k, q) * v_power(-2 * ext, q) *
                               Scalar(mpq_class(count), 0, q);
                K0Class shift = k0_of(I);
                // middles via Riedtmann-Peng counts
                auto dM = std::vector<int>(n);
                for (int j = 0; j < n; ++j) dM[j] = dN[j] + dL[j];
                for (auto& M : T.classes_with_dim(dM)) {
                    mpz_class cnt = T.ext_count_with_middle(N, L, M);
                    if (cnt == 0) continue;
                    out.add_term({CohClass::tor(pt, M), shift},
                                 coeff * Scalar(mpq_class(cnt), 0, q));
                }
            }
        }
    }
    return out;
}

}  // namespace

int main() {
    // 1. coprime-count formulas over F_2 and F_3
    criterion(1, "coprime-count formulas", 1.0, [&](std::string&) {
        bool ok = true;
        for (long q : {2L, 3L}) {
            GroundField G(q, 2);
            for (int a = 0; a <= 4; ++a)
                for (int b = 0; a + b <= 4; ++b) {
                    long got = G.count_coprime_pairs(a, b, true);
                    long want;
                    if (a == 0) {
                        long p = 1;
                        for (int e = 0; e <= b; ++e) p *= q;
                        want = (q - 1) * (p - 1);
                    } else {
                        long p = 1;
                        for (int e = 0; e < a + b; ++e) p *= q;
                        want = (q - 1) * (q - 1) * p;
                    }
                    if (got != want) ok = false;
                }
        }
        return ok;
    });

    // 2. automorphism orders: formula vs brute force; eq:aut for partitions
    criterion(2, "automorphism orders", 30.0, [&](std::string&) {
        bool ok = true;
        GroundField G2(2, 2);
        for (int n : {1, 2}) {
            Tube T(G2.field(), n);
            std::vector<int> bound(n, 3);
            for (auto& cls : T.classes_with_dim_at_most(bound)) {
                if (cls.total_length() > 3) continue;
                if (T.aut_order(cls) != T.aut_order_brute(cls)) ok = false;
            }
        }
        // eq:aut on partitions of size <= 4 at q in {2,3}
        for (long q : {2L, 3L}) {
            GroundField G(q, 2);
            Tube T(G.field(), 1);
            std::vector<int> bound = {4};
            for (auto& cls : T.classes_with_dim_at_most(bound)) {
                if (cls.total_length() == 0) continue;
                // direct evaluation of the closed formula
                std::map<int, int> l;
                for (auto& [t, len] : cls.parts) l[len] += 1;
                long expo = cls.total_length();
                for (auto& [i, li] : l) expo += (long)i * li * (li - 1);
                for (auto& [i, li] : l)
                    for (auto& [j, lj] : l)
                        if (i < j) expo += 2L * i * li * lj;
                mpq_class value;
                mpz_class qe;
                mpz_pow_ui(qe.get_mpz_t(), mpz_class(q).get_mpz_t(), (unsigned long)expo);
                value = mpq_class(qe);
                for (auto& [i, li] : l)
                    for (int v = 1; v <= li; ++v) {
                        mpz_class qv;
                        mpz_pow_ui(qv.get_mpz_t(), mpz_class(q).get_mpz_t(), (unsigned long)v);
                        value *= mpq_class(qv - 1) / mpq_class(qv);
                    }
                value.canonicalize();
                if (value.get_den() != 1 || T.aut_order(cls) != value.get_num()) ok = false;
            }
        }
        return ok;
    });

    // 3. hall-engine oracle equivalence in C_2, C_3 at q=2
    criterion(3, "hall-engine oracle equivalence", 120.0, [&](std::string& detail) {
        bool ok = true;
        int checked = 0;
        for (int n : {2, 3}) {
            Ctx c(2, {n, 1});
            Engine E(c);
            PointId pt = c.gf->point_at_infinity();
            const Tube& T = tube_at(c, pt);
            std::vector<int> bound(n, 4);
            auto classes = T.classes_with_dim_at_most(bound);
            for (auto& A : classes)
                for (auto& B : classes) {
                    if (A.total_length() == 0 || B.total_length() == 0) continue;
                    if (A.total_length() + B.total_length() > 4) continue;
                    HallElt got = E.basis_product(CohClass::tor(pt, A), CohClass::tor(pt, B));
                    HallElt want = oracle_tube_product(E, T, pt, A, B);
                    if (!(got == want)) ok = false;
                    ++checked;
                }
        }
        detail = std::to_string(checked) + " pairs";
        return ok;
    });

    // 4. associativity on 200 sampled triples, weight (2,2), q=3
    criterion(4, "associativity", 300.0, [&](std::string& detail) {
        RunConfig cfg;
        cfg.q = 3;
        cfg.weights = {2, 2};
        cfg.suite = "associativity";
        cfg.seed = 20240817;
        RunResult res = run_suites(cfg);
        detail = std::to_string(res.holds) + " triples";
        return res.failures == 0 && res.holds >= 200;
    });

    // 5. tube Drinfeld relations and closed forms in C_2, C_3 at q in {2,3}
    criterion(5, "tube Drinfeld relations", 600.0, [&](std::string& detail) {
        bool ok = true;
        int holds = 0, consumed = 0;
        for (long q : {2L, 3L})
            for (int n : {2, 3}) {
                Ctx c(q, {n, 1});
                Engine E(c);
                GeneratorSet G(E);
                Verifier V(G);
                std::vector<RelationInstance> insts;
                auto vx = [&](int j) { return Vertex::branch(1, j); };
                for (int j = 1; j < n; ++j) {
                    for (long m = 1; m <= 2; ++m)
                        for (long mm = m; mm <= 2; ++mm)
                            insts.push_back({"iDR1b", vx(j), vx(j), m, mm, 0, 0, 0, 0});
                    for (long m = 1; m <= 2; ++m)
                        for (long l = -2; l <= 2; ++l)
                            insts.push_back({"iDR2", vx(j), vx(j), m, 0, 0, l, 0, 0});
                    for (long k = -1; k <= 1; ++k)
                        for (long l = k; l <= 1; ++l)
                            insts.push_back({"iDR3b", vx(j), vx(j), 0, 0, k, l, 0, 0});
                }
                if (n == 3) {
                    for (long k = 0; k <= 1; ++k)
                        for (long l = 0; l <= 1; ++l) {
                            insts.push_back({"iDR3a", vx(1), vx(2), 0, 0, k, l, 0, 0});
                            insts.push_back({"iDR5", vx(1), vx(2), 0, 0, 0, l, 0, k});
                            insts.push_back({"iDR5", vx(2), vx(1), 0, 0, 0, l, 0, k});
                        }
                    // iDR1b across the two tube vertices
                    insts.push_back({"iDR1b", vx(1), vx(2), 1, 1, 0, 0, 0, 0});
                    insts.push_back({"iDR1b", vx(1), vx(2), 2, 1, 0, 0, 0, 0});
                    // iDR2 across adjacent vertices
                    for (long l = -1; l <= 1; ++l) insts.push_back({"iDR2", vx(1), vx(2), 1, 0, 0, l, 0, 0});
                }
                for (auto& inst : insts) {
                    auto rec = V.check_relation(inst);
                    if (rec.status == "holds") ++holds;
                    else if (rec.status == "consumed-by-bootstrap") ++consumed;
                    else ok = false;
                }
                // closed forms of Cor 5.4
                Vertex v1 = Vertex::branch(1, 1);
                Scalar one = Scalar::one(q), iq = one / Scalar::of_int(q, q);
                PointId pt = c.gf->point_at_infinity();
                auto S = [&](int top, int len) {
                    return CohClass::tor(pt, TubeClass::uniserial(top, len, n));
                };
                auto elt = [&](const CohClass& m, Scalar s) {
                    return HallElt::term(q, m, K0Class::zero(c), s);
                };
                Scalar f = one / Scalar::of_int(q - 1, q);
                HallElt theta11 = elt(S(1, n), f * v_power(-1, q)) -
                                  elt(S(0, n - 1).direct_sum(S(1, 1)), f * v_power(-1, q)) -
                                  elt(S(0, n), f * v_power(1, q));
                if (!(G.Theta(v1, 1) == theta11)) ok = false;
                K0Class sh1 = K0Class::simple(c, 1, 1) - K0Class::delta(c);
                if (!(G.B(v1, -1) == HallElt::term(q, S(0, n - 1), sh1, -one))) ok = false;
                HallElt b11 = elt(S(1, n + 1), iq) - elt(S(1, 1).direct_sum(S(0, n)), iq);
                if (!(G.B(v1, 1) == b11)) ok = false;
                K0Class sh2 = K0Class::simple(c, 1, 1) - K0Class::delta(c).scaled(2);
                HallElt b1m2 = HallElt::term(q, S(0, 2 * n - 1), sh2, -iq) +
                               HallElt::term(q, S(0, n).direct_sum(S(0, n - 1)), sh2, iq);
                if (!(G.B(v1, -2) == b1m2)) ok = false;
            }
        detail = std::to_string(holds) + " held, " + std::to_string(consumed) + " consumed";
        return ok;
    });

    // 6. star relations on the projective line at q = 2
    criterion(6, "star relations on P1", 600.0, [&](std::string& detail) {
        Ctx c(2, {1, 1});
        Engine E(c);
        GeneratorSet G(E);
        Verifier V(G);
        Vertex star = Vertex::star_v();
        bool ok = true;
        int holds = 0;
        for (long m = 1; m <= 2; ++m)
            for (long l = -1; l <= 1; ++l) {
                auto rec = V.check_relation({"iDR2", star, star, m, 0, 0, l, 0, 0});
                rec.status == "holds" ? ++holds : (ok = false, 0);
            }
        for (long k = -1; k <= 1; ++k)
            for (long l = k; l <= 1; ++l) {
                auto rec = V.check_relation({"iDR3b", star, star, 0, 0, k, l, 0, 0});
                rec.status == "holds" ? ++holds : (ok = false, 0);
            }
        detail = std::to_string(holds) + " held";
        return ok;
    });

    // 7. Theorem A desk suite on weight (2,2) at q = 3
    criterion(7, "Theorem A desk suite (2,2) q=3", 3600.0, [&](std::string& detail) {
        Ctx c(3, {2, 2});
        Engine E(c);
        GeneratorSet G(E);
        Verifier V(G);
        Vertex star = Vertex::star_v(), b1 = Vertex::branch(1, 1), b2 = Vertex::branch(2, 1);
        bool ok = true;
        int holds = 0, consumed = 0;
        std::vector<RelationInstance> insts;
        // iDR4 across branches
        for (long k = -1; k <= 1; ++k)
            for (long l = -1; l <= 1; ++l) insts.push_back({"iDR4", b1, b2, 0, 0, k, l, 0, 0});
        // coBi1 / iDR3a between star and [i,1]
        for (auto& b : {b1, b2})
            for (long k = -1; k <= 1; ++k)
                for (long l = -1; l <= 1; ++l) {
                    insts.push_back({"iDR3a", star, b, 0, 0, k, l, 0, 0});
                }
        // humstarbvl and humbvlstar
        for (auto& b : {b1, b2})
            for (long m = 1; m <= 2; ++m)
                for (long l = -1; l <= 1; ++l) {
                    insts.push_back({"iDR2", star, b, m, 0, 0, l, 0, 0});
                    insts.push_back({"iDR2", b, star, m, 0, 0, l, 0, 0});
                }
        // iDR5 both orientations
        for (auto& b : {b1, b2})
            for (long k1 = 0; k1 <= 1; ++k1)
                for (long k2 = k1; k2 <= 1; ++k2)
                    for (long l = -1; l <= 0; ++l) {
                        insts.push_back({"iDR5", star, b, 0, 0, 0, l, k1, k2});
                        insts.push_back({"iDR5", b, star, 0, 0, 0, l, k1, k2});
                    }
        for (auto& inst : insts) {
            auto rec = V.check_relation(inst);
            if (rec.status == "holds") ++holds;
            else if (rec.status == "consumed-by-bootstrap") ++consumed;
            else {
                ok = false;
                std::fprintf(stderr, "  AC7 failure: %s %s -> %s\n", rec.id.c_str(),
                             rec.params.c_str(), rec.status.c_str());
            }
        }
        detail = std::to_string(holds) + " held, " + std::to_string(consumed) +
                 " consumed, transport=native";
        return ok;
    });

    // 8. Theorem B closed forms vs bootstrap, r <= 2
    criterion(8, "Theorem B closed forms", 600.0, [&](std::string& detail) {
        bool ok = true;
        int checks = 0;
        // weight (2,2) q=3 at [1,1]; weight (2,3) q=3 at both branch tubes
        std::vector<std::pair<std::vector<int>, int>> configs = {
            {{2, 2}, 1}, {{2, 3}, 1}, {{2, 3}, 2}};
        for (auto& [w, i] : configs) {
            Ctx c(3, w);
            Engine E(c);
            GeneratorSet G(E);
            for (long r = 1; r <= 2; ++r) {
                if (!(G.closed_B_i1(i, r) == G.B(Vertex::branch(i, 1), r))) ok = false;
                if (!(G.closed_B_i1(i, -r) == G.B(Vertex::branch(i, 1), -r))) ok = false;
                if (!(G.closed_Theta_i1(i, r) == G.Theta(Vertex::branch(i, 1), r))) ok = false;
                checks += 3;
            }
        }
        detail = std::to_string(checks) + " comparisons";
        return ok;
    });

    // 9. phi/psi table, a,b <= 3, q = 2, two independent computations
    criterion(9, "phi/psi table", 60.0, [&](std::string&) {
        long q = 2;
        int p = 2;
        GroundField G(q, 2);
        Tube T(G.field(), p);
        bool ok = true;
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) {
                long expect = a < b ? q : (a > b ? 1 : q + 1);
                TubeClass M;
                M.add_part(0, a * p - 1, p).add_part(0, b * p - 1, p);
                TubeClass L;
                L.add_part(0, a * p - 1, p).add_part(0, b * p, p);
                if (T.ext_count_with_middle(M, TubeClass::uniserial(1, 1, p), L) !=
                    mpz_class((q - 1) * expect))
                    ok = false;
                TubeClass Lp;
                Lp.add_part(0, a * p - 1, p).add_part(0, b * p - 1, p);
                TubeClass Mp;
                Mp.add_part(0, a * p - 1, p);
                if (b >= 2) Mp.add_part(0, (b - 1) * p, p);
                long expect_ba = b < a ? q : (b > a ? 1 : q + 1);
                if (T.hall_number(Lp, Mp, TubeClass::uniserial(0, p - 1, p)) != expect_ba) ok = false;
            }
        return ok;
    });

    // 10. lemma suite
    criterion(10, "lemma suite", 900.0, [&](std::string& detail) {
        bool ok = true;
        int held = 0;
        auto run = [&](long q, std::vector<int> w, std::vector<std::string> suites) {
            Ctx c(q, std::move(w));
            Engine E(c);
            GeneratorSet G(E);
            Verifier V(G);
            for (auto& s : suites)
                for (auto& rec : V.lemma_suite(s)) {
                    if (rec.status == "holds") ++held;
                    else {
                        ok = false;
                        std::fprintf(stderr, "  AC10 failure: %s %s %s\n", s.c_str(),
                                     rec.id.c_str(), rec.params.c_str());
                    }
                }
        };
        // middle-ending and pi-plus-one with p_i up to 3
        run(3, {2, 3}, {"middle-ending", "pi-plus-one"});
        // theta and B four-term in tubes of rank 2 and 3
        run(2, {2, 1}, {"theta-B-four-term"});
        run(2, {3, 1}, {"theta-B-four-term"});
        // H decomposition and twist independence
        run(3, {2, 2}, {"hxm", "twist-independence"});
        detail = std::to_string(held) + " identities";
        return ok;
    });

    // 11. negative control
    criterion(11, "negative control", 60.0, [&](std::string& detail) {
        Ctx c(3, {2, 2});
        Engine E(c);
        GeneratorSet G(E);
        Verifier V(G);
        auto recs = V.negative_control();
        bool ok = !recs.empty();
        for (auto& r : recs)
            if (r.status != "holds") ok = false;
        detail = std::to_string(recs.size()) + " perturbed templates detected";
        return ok;
    });

    if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
