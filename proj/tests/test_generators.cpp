#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ihall/generators.hpp"

using namespace ihall;

namespace {
CohClass S(const Ctx& c, int branch, int top, int len) {
    PointId p;
    p.exceptional = true;
    p.branch = branch;
    p.deg = 1;
    return CohClass::tor(p, TubeClass::uniserial(top, len, c.weights[branch - 1]));
}
HallElt elt(const Ctx& c, const CohClass& m, Scalar s) {
    return HallElt::term(c.q, m, K0Class::zero(c), s);
}
}  // namespace

TEST_CASE("theta_star basics and twist independence") {
    for (long q : {2L, 3L}) {
        Ctx c(q, {1, 1});
        Engine E(c);
        GeneratorSet G(E);
        // Theta_{*,0} = 1/(v - v^-1)
        HallElt t0 = G.Theta(Vertex::star_v(), 0);
        CHECK(t0.size() == 1);
        CHECK(t0.terms().begin()->second == Scalar::one(q) / (E.v(1) - E.v(-1)));
        // Theta_{*,1} on P^1: (1/(q-1)) sum over q+1 degree-one points [S_x]
        HallElt t1 = G.Theta(Vertex::star_v(), 1);
        CHECK(t1.size() == (size_t)(q + 1));
        for (auto& [k, s] : t1.terms()) {
            CHECK(s == Scalar::one(q) / E.sca(q - 1));
            CHECK(k.m.torsion_length() == 1);
        }
        // independence of the defining shift
        for (long m = 0; m <= 3; ++m)
            CHECK(G.theta_star_at_shift(m, 0) == G.theta_star_at_shift(m, 1));
    }
}

TEST_CASE("H_star decomposes into per-point parts (lem:Hxm)") {
    for (long q : {2L, 3L}) {
        for (auto weights : {std::vector<int>{1, 1}, std::vector<int>{2, 2}}) {
            Ctx c(q, weights);
            Engine E(c);
            GeneratorSet G(E);
            for (long m = 1; m <= 2; ++m) {
                HallElt sum(q);
                for (int d = 1; d <= m; ++d) {
                    if (m % d) continue;
                    for (auto& x : c.gf->closed_points(d)) sum = sum + G.h_point(x, m);
                }
                CHECK(G.H(Vertex::star_v(), m) == sum);
            }
        }
    }
}

TEST_CASE("exp/log roundtrip for the star series") {
    Ctx c(3, {2, 2});
    Engine E(c);
    GeneratorSet G(E);
    std::vector<HallElt> theta;
    for (long m = 1; m <= 3; ++m) theta.push_back(G.Theta(Vertex::star_v(), m));
    auto h = G.h_from_theta(theta);
    // the closed formula for H_star must agree with the log transform
    for (long m = 1; m <= 3; ++m) CHECK(h[m - 1] == G.H(Vertex::star_v(), m));
    auto back = G.theta_from_h(h);
    for (long m = 1; m <= 3; ++m) CHECK(back[m - 1] == theta[m - 1]);
}

TEST_CASE("branch seeds: eq:B1-1 and eq:Theta11") {
    for (long q : {2L, 3L}) {
        for (int n : {2, 3}) {
            Ctx c(q, {n, 1});
            Engine E(c);
            GeneratorSet G(E);
            Vertex v = Vertex::branch(1, 1);
            // B_{1,-1} = -[S_0^{(n-1)}] * [K_{alpha_1 - delta}]
            HallElt b = G.B(v, -1);
            K0Class shift = K0Class::simple(c, 1, 1) - K0Class::delta(c);
            HallElt want = HallElt::term(c.q, S(c, 1, 0, n - 1), shift, -Scalar::one(q));
            CHECK(b == want);
            // Theta_{1,1} = (1/(q-1)) (v^-1 [S_1^{(n)}] - v^-1 [S_0^{(n-1)} + S_1] - v [S_0^{(n)}])
            HallElt t = G.Theta(v, 1);
            Scalar f = Scalar::one(q) / E.sca(q - 1);
            HallElt wt = elt(c, S(c, 1, 1, n), f * E.v(-1)) -
                         elt(c, S(c, 1, 0, n - 1).direct_sum(S(c, 1, 1, 1)), f * E.v(-1)) -
                         elt(c, S(c, 1, 0, n), f * E.v(1));
            CHECK(t == wt);
        }
    }
}

TEST_CASE("bootstrap matches closed forms eq:B11 and eq:B1-2") {
    for (long q : {2L, 3L}) {
        for (int n : {2, 3}) {
            Ctx c(q, {n, 1});
            Engine E(c);
            GeneratorSet G(E);
            Vertex v = Vertex::branch(1, 1);
            // B_{1,1} = 1/q [S_1^{(n+1)}] - 1/q [S_1 + S_0^{(n)}]
            HallElt b1 = G.B(v, 1);
            Scalar iq = Scalar::one(q) / E.sca(q);
            HallElt want1 = elt(c, S(c, 1, 1, n + 1), iq) -
                            elt(c, S(c, 1, 1, 1).direct_sum(S(c, 1, 0, n)), iq);
            CHECK(b1 == want1);
            // B_{1,-2} = (-1/q [S_0^{(2n-1)}] + 1/q [S_0^{(n)} + S_0^{(n-1)}]) * [K_{alpha_1 - 2 delta}]
            HallElt b2 = G.B(v, -2);
            K0Class shift = K0Class::simple(c, 1, 1) - K0Class::delta(c).scaled(2);
            HallElt want2 = HallElt::term(c.q, S(c, 1, 0, 2 * n - 1), shift, -iq) +
                            HallElt::term(c.q, S(c, 1, 0, n).direct_sum(S(c, 1, 0, n - 1)), shift, iq);
            CHECK(b2 == want2);
        }
    }
}

TEST_CASE("mrd sets") {
    Ctx c(3, {2, 2});
    Engine E(c);
    GeneratorSet G(E);
    // M_{1 delta + alpha_11}, p_1 = 2: {S_{1,1}^{(3)}, S_{1,1} + S_{1,0}^{(2)}}
    auto plus = G.mrd_set(0, 1, 1);
    REQUIRE(plus.size() == 2);
    CHECK(std::find(plus.begin(), plus.end(), S(c, 1, 1, 3)) != plus.end());
    CHECK(std::find(plus.begin(), plus.end(), S(c, 1, 1, 1).direct_sum(S(c, 1, 0, 2))) != plus.end());
    // M_{1 delta - alpha_11}: only S_{1,0}^{(1)}
    auto minus = G.mrd_set(1, 1, 1);
    REQUIRE(minus.size() == 1);
    CHECK(minus[0] == S(c, 1, 0, 1));
    // M_{1, 1 delta}: {S_{1,1}^{(2)}, S_{1,0}^{(1)} + S_{1,1}^{(1)}}
    auto imag = G.mrd_set(2, 1, 1);
    REQUIRE(imag.size() == 2);
    CHECK(std::find(imag.begin(), imag.end(), S(c, 1, 1, 2)) != imag.end());
    CHECK(std::find(imag.begin(), imag.end(), S(c, 1, 0, 1).direct_sum(S(c, 1, 1, 1))) != imag.end());
}

TEST_CASE("Theorem B closed forms match the bootstrap, r <= 2") {
    for (long q : {3L}) {
        for (int n : {2, 3}) {
            Ctx c(q, {n, 1});
            Engine E(c);
            GeneratorSet G(E);
            Vertex v = Vertex::branch(1, 1);
            for (long r = 1; r <= 2; ++r) {
                CHECK(G.closed_B_i1(1, r) == G.B(v, r));
                CHECK(G.closed_B_i1(1, -r) == G.B(v, -r));
                CHECK(G.closed_Theta_i1(1, r) == G.Theta(v, r));
            }
        }
    }
}

TEST_CASE("Theta and H elements at one vertex commute") {
    Ctx c(3, {2, 1});
    Engine E(c);
    GeneratorSet G(E);
    Vertex v = Vertex::branch(1, 1);
    for (long a = 1; a <= 2; ++a)
        for (long b = 1; b <= 2; ++b)
            CHECK(E.bracket(G.Theta(v, a), G.Theta(v, b), Scalar::one(3)).is_zero());
    CHECK(E.bracket(G.H(v, 1), G.H(v, 2), Scalar::one(3)).is_zero());
}
