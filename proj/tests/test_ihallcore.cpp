#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ihall/ihallcore.hpp"

using namespace ihall;

namespace {

CohClass S(const Ctx& c, int branch, int top, int len) {
    PointId p;
    p.exceptional = true;
    p.branch = branch;
    p.deg = 1;
    return CohClass::tor(p, TubeClass::uniserial(top, len, c.weights[branch - 1]));
}
CohClass O(const Ctx& c, long l) { return CohClass::line(LVec::c_mult(c, l)); }
CohClass Ox(const Ctx& c, long l, int branch, int mult = 1) {
    return CohClass::line(LVec::c_mult(c, l).add(c, LVec::x_gen(c, branch, mult)));
}
HallElt elt(const Ctx& c, const CohClass& m) {
    return HallElt::term(c.q, m, K0Class::zero(c), Scalar::one(c.q));
}

// check every output term satisfies class(M) + 2 alpha = class(A) + class(B):
// the class of the underlying 1-periodic complex is conserved, and an acyclic
// complex K_alpha restricts to alpha twice
void check_k0(Engine& E, const CohClass& A, const CohClass& B) {
    const Ctx& c = E.ctx();
    K0Class tot = E.class_of(A) + E.class_of(B);
    for (auto& [k, s] : E.basis_product(A, B).terms()) {
        CHECK(E.class_of(k.m) + k.k.scaled(2) == tot);
    }
    (void)c;
}

}  // namespace

TEST_CASE("Si1 and co, both directions (paper display)") {
    for (long q : {2L, 3L}) {
        for (int p1 : {2, 3}) {
            Ctx c(q, {p1, 2});
            Engine E(c);
            for (long l : {-1L, 0L, 1L}) {
                // [O(lc)]*[S_{1,1}] = [S_{1,1} + O(lc)]
                HallElt lhs = E.basis_product(O(c, l), S(c, 1, 1, 1));
                HallElt rhs = elt(c, O(c, l).direct_sum(S(c, 1, 1, 1)));
                CHECK(lhs == rhs);
                // [S_{1,1}]*[O(lc)] = v^-1 [S+O] + (v - v^-1) [O(lc + x_1)]
                HallElt lhs2 = E.basis_product(S(c, 1, 1, 1), O(c, l));
                HallElt rhs2 =
                    elt(c, O(c, l).direct_sum(S(c, 1, 1, 1))).scaled(E.v(-1)) +
                    elt(c, Ox(c, l, 1)).scaled(E.v(1) - E.v(-1));
                CHECK(lhs2 == rhs2);
                check_k0(E, S(c, 1, 1, 1), O(c, l));
            }
        }
    }
}

TEST_CASE("Si0 and co, both directions (paper display)") {
    for (long q : {2L, 3L}) {
        Ctx c(q, {2, 2});
        Engine E(c);
        long l = 0;
        int p1 = 2;
        CohClass s0 = S(c, 1, 0, p1 - 1);
        // [S_{1,0}^{(p-1)}]*[O(lc)] = [S + O(lc)]
        CHECK(E.basis_product(s0, O(c, l)) == elt(c, s0.direct_sum(O(c, l))));
        // [O(lc)]*[S_{1,0}^{(p-1)}] = v^-1 [S+O] + (v-v^-1) [O((l-1)c + x_1)] * [K_{delta - alpha_11}]
        HallElt lhs = E.basis_product(O(c, l), s0);
        K0Class shift = K0Class::delta(c) - K0Class::simple(c, 1, 1);
        HallElt rhs = elt(c, s0.direct_sum(O(c, l))).scaled(E.v(-1)) +
                      HallElt::term(c.q, Ox(c, l - 1, 1), shift, E.v(1) - E.v(-1));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("tube products from the cyclic-quiver section") {
    // C_2 realized as branch 1 of weight (2,1); q = 2 and 3
    for (long q : {2L, 3L}) {
        Ctx c(q, {2, 1});
        Engine E(c);
        int n = 2;
        auto S0 = [&](int len) { return S(c, 1, 0, len); };
        auto S1 = [&](int len) { return S(c, 1, 1, len); };
        for (int r : {1, 2}) {
            // [S_0^{(n-1)}] * [S_0^{(rn)}] = [S_0^{(rn)} + S_0^{(n-1)}]
            CHECK(E.basis_product(S0(n - 1), S0(r * n)) ==
                  elt(c, S0(n - 1).direct_sum(S0(r * n))));
            // [S_0^{(rn)}] * [S_0^{(n-1)}] = 1/q [sum] + (q-1)/q [S_0^{((r+1)n-1)}]
            //   + (q-1) [S_1^{((r-1)n+1)}] * [K_{delta - alpha_1}]
            HallElt lhs = E.basis_product(S0(r * n), S0(n - 1));
            Scalar iq = E.sca(1) / E.sca(q);
            HallElt rhs = elt(c, S0(r * n).direct_sum(S0(n - 1))).scaled(iq) +
                          elt(c, S0((r + 1) * n - 1)).scaled((E.sca(q) - E.sca(1)) / E.sca(q));
            K0Class shift = K0Class::delta(c) - K0Class::simple(c, 1, 1);
            rhs = rhs + HallElt::term(c.q, S1((r - 1) * n + 1), shift, E.sca(q - 1));
            CHECK(lhs == rhs);
            // [S_1]*[S_0^{(rn)}] = 1/q[sum] + (q-1)/q [S_1^{(rn+1)}] + (q-1)[S_0^{(rn-1)}]*[K_{alpha_1}]
            HallElt lhs2 = E.basis_product(S1(1), S0(r * n));
            HallElt rhs2 = elt(c, S1(1).direct_sum(S0(r * n))).scaled(iq) +
                           elt(c, S1(r * n + 1)).scaled((E.sca(q) - E.sca(1)) / E.sca(q)) +
                           HallElt::term(c.q, S0(r * n - 1), K0Class::simple(c, 1, 1), E.sca(q - 1));
            CHECK(lhs2 == rhs2);
            // [S_0^{(rn)}]*[S_1] = [S_0^{(rn)} + S_1]
            CHECK(E.basis_product(S0(r * n), S1(1)) == elt(c, S0(r * n).direct_sum(S1(1))));
        }
    }
}

TEST_CASE("line-line products on the projective line") {
    Ctx c(2, {1, 1});
    Engine E(c);
    // [O]*[O(c)]: injective sections + split middle only
    HallElt r1 = E.basis_product(O(c, 0), O(c, 1));
    // f = 0 term: v^{-<O,O(c)>} [O + O(c)], <O,O(c)> = 2
    Scalar t0 = E.v(-2);
    CHECK(r1.terms().at({O(c, 0).direct_sum(O(c, 1)), K0Class::zero(c)}) == t0);
    // nonzero sections: 3 linear + ... q^2 - 1 = 3 sections to O(c): coker S_x
    // each gives [S_x] * [K_O]
    int torsion_terms = 0;
    for (auto& [k, s] : r1.terms())
        if (k.m.rank() == 0) {
            ++torsion_terms;
            CHECK(k.k == K0Class::structure_sheaf(c));
            CHECK(s == t0);  // v^{-2} * 1 each
        }
    CHECK(torsion_terms == 3);  // q+1 points of degree 1
    check_k0(E, O(c, 0), O(c, 1));

    // [O(2c)]*[O]: no sections; middles split + O(c)+O(c)
    HallElt r2 = E.basis_product(O(c, 2), O(c, 0));
    CHECK(r2.size() == 2);
    CohClass split = O(c, 2).direct_sum(O(c, 0));
    CohClass balanced = O(c, 1).direct_sum(O(c, 1));
    // <O(2c), O> = 1 - 2 = -1; ext = 1: coefficient v^{1} q^{-1} each (mult 1)
    CHECK(r2.terms().at({split, K0Class::zero(c)}) == E.v(1) * E.v(-2));
    CHECK(r2.terms().at({balanced, K0Class::zero(c)}) == E.v(1) * E.v(-2));
}

TEST_CASE("distinct-point torsion commutes") {
    Ctx c(3, {2, 2});
    Engine E(c);
    CohClass a = S(c, 1, 1, 1);
    CohClass b = S(c, 2, 1, 2);
    HallElt ab = E.basis_product(a, b);
    HallElt ba = E.basis_product(b, a);
    CHECK(ab == ba);
    CHECK(ab == elt(c, a.direct_sum(b)));
}

TEST_CASE("middle and ending terms same (paper lemma)") {
    // [[O(lc)], [S_{ij}^{(k)}]] = [[O(lc)], [S_{ij}^{(j)} + S_{i,0}^{(k-j)}]]
    for (long q : {3L}) {
        Ctx c(q, {2, 2});
        Engine E(c);
        for (long l : {0L, 1L}) {
            int j = 1, k = 2;
            HallElt lhs = E.bracket(elt(c, O(c, l)), elt(c, S(c, 1, j, k)), Scalar::one(q));
            CohClass sum = S(c, 1, j, j).direct_sum(S(c, 1, 0, k - j));
            HallElt rhs = E.bracket(elt(c, O(c, l)), elt(c, sum), Scalar::one(q));
            CHECK(lhs == rhs);
            CHECK(!lhs.is_zero());
        }
    }
}

TEST_CASE("associativity on sampled triples, weight (2,2) q=3") {
    Ctx c(3, {2, 2});
    Engine E(c);
    std::vector<CohClass> pool = {O(c, 0),        O(c, 1),         S(c, 1, 1, 1),
                                  S(c, 1, 0, 1),  S(c, 2, 1, 1),   S(c, 1, 1, 2),
                                  S(c, 1, 0, 2)};
    int checked = 0;
    for (size_t i = 0; i < pool.size(); ++i)
        for (size_t j = 0; j < pool.size(); ++j)
            for (size_t k = 0; k < pool.size(); ++k) {
                if ((i + 2 * j + 3 * k) % 4 != 0) continue;  // thin the grid
                HallElt x = elt(c, pool[i]), y = elt(c, pool[j]), z = elt(c, pool[k]);
                HallElt l = E.mul(E.mul(x, y), z);
                HallElt r = E.mul(x, E.mul(y, z));
                CHECK(l == r);
                ++checked;
            }
    CHECK(checked > 20);
}

TEST_CASE("torus centrality and K0 bookkeeping") {
    Ctx c(3, {2, 2});
    Engine E(c);
    HallElt x = elt(c, S(c, 1, 1, 1));
    HallElt k = HallElt::term(c.q, CohClass::zero(), K0Class::delta(c), Scalar::one(c.q));
    CHECK(E.mul(k, x) == E.mul(x, k));
    check_k0(E, O(c, 1), S(c, 1, 0, 2));
    check_k0(E, S(c, 1, 0, 2), O(c, -1));
}

TEST_CASE("normalize_dbl uses automorphism orders") {
    Ctx c(2, {2, 2});
    Engine E(c);
    // [[S_{1,1}]] = [S_{1,1}]/(q-1)
    HallElt n = E.normalize_dbl(S(c, 1, 1, 1));
    CHECK(n.terms().begin()->second == Scalar(mpq_class(1, 1), 0, 2));
    // |Aut(S+S)| at q=2 Jordan (ordinary point z=1... use branch of weight 1)
    Ctx cp(2, {1, 1});
    Engine Ep(cp);
    PointId inf = cp.gf->point_at_infinity();
    TubeClass ss;
    ss.add_part(0, 1, 1).add_part(0, 1, 1);
    CHECK(Ep.aut_order(CohClass::tor(inf, ss)) == 6);
    // mixed: |Aut(O + S)| = (q-1) * |Aut S| * q^{dim Hom(O, S)}
    CohClass mixed = O(cp, 0).direct_sum(CohClass::tor(inf, TubeClass::uniserial(0, 1, 1)));
    CHECK(Ep.aut_order(mixed) == (2 - 1) * (2 - 1) * 2);
}
