#include "ihall/verifier.hpp"

#include <chrono>
#include <stdexcept>

namespace ihall {

std::string RelationInstance::params() const {
    std::string s = "mu=" + mu.str() + " nu=" + nu.str();
    auto add = [&](const char* name, long v) { s += std::string(" ") + name + "=" + std::to_string(v); };
    if (id == "iDR1b") { add("m", m); add("n", n); }
    else if (id == "iDR2") { add("m", m); add("l", l); }
    else if (id == "iDR4" || id == "iDR3a") { add("k", k); add("l", l); }
    else if (id == "iDR3b") { add("k", k); add("l", l); }
    else if (id == "iDR5") { add("k1", k1); add("k2", k2); add("l", l); }
    return s;
}

std::vector<Vertex> Verifier::vertices() const {
    std::vector<Vertex> vs = {Vertex::star_v()};
    const Ctx& c = ctx();
    for (int i = 1; i <= c.t(); ++i)
        for (int j = 1; j < c.weights[i - 1]; ++j) vs.push_back(Vertex::branch(i, j));
    return vs;
}

HallElt Verifier::relation_residual(const RelationInstance& inst, bool perturb) {
    GeneratorSet& G = *G_;
    Engine& E = G.engine();
    const Ctx& c = ctx();
    long q = c.q;
    Scalar one = Scalar::one(q);
    Scalar two = perturb ? Scalar::of_int(2, q) : one;  // scales the first LHS term
    K0Class delta = K0Class::delta(c);

    if (inst.id == "iDR1b") {
        HallElt lhs = E.mul(G.H(inst.mu, inst.m), G.H(inst.nu, inst.n)).scaled(two) -
                      E.mul(G.H(inst.nu, inst.n), G.H(inst.mu, inst.m));
        return lhs;
    }
    if (inst.id == "iDR2") {
        long cij = cartan(c, inst.mu, inst.nu);
        HallElt lhs = E.mul(G.H(inst.mu, inst.m), G.B(inst.nu, inst.l)).scaled(two) -
                      E.mul(G.B(inst.nu, inst.l), G.H(inst.mu, inst.m));
        Scalar coef = quantum_int(inst.m * cij, q) / Scalar::of_int(inst.m, q);
        HallElt rhs = G.B(inst.nu, inst.l + inst.m).scaled(coef) -
                      G.B(inst.nu, inst.l - inst.m).shifted(delta.scaled(inst.m)).scaled(coef);
        return lhs - rhs;
    }
    if (inst.id == "iDR4") {
        if (cartan(c, inst.mu, inst.nu) != 0) throw std::invalid_argument("iDR4 needs c = 0");
        return E.mul(G.B(inst.mu, inst.k), G.B(inst.nu, inst.l)).scaled(two) -
               E.mul(G.B(inst.nu, inst.l), G.B(inst.mu, inst.k));
    }
    if (inst.id == "iDR3a") {
        if (cartan(c, inst.mu, inst.nu) != -1) throw std::invalid_argument("iDR3a needs c = -1");
        HallElt t1 = E.bracket(G.B(inst.mu, inst.k), G.B(inst.nu, inst.l + 1), E.v(1)).scaled(two);
        HallElt t2 = E.bracket(G.B(inst.mu, inst.k + 1), G.B(inst.nu, inst.l), E.v(-1)).scaled(E.v(1));
        return t1 - t2;
    }
    if (inst.id == "iDR3b") {
        const Vertex& v = inst.mu;
        K0Class alpha = G.alpha_of(v);
        HallElt lhs =
            E.bracket(G.B(v, inst.k), G.B(v, inst.l + 1), E.v(-2)).scaled(two) -
            E.bracket(G.B(v, inst.k + 1), G.B(v, inst.l), E.v(2)).scaled(E.v(-2));
        Scalar fac = (one - E.sca(q)) * (one - E.sca(q));
        HallElt rhs(q);
        auto add_term = [&](long idx, long cpow, Scalar sc) {
            rhs = rhs + G.Theta(v, idx).shifted(delta.scaled(cpow) + alpha).scaled(sc * fac);
        };
        add_term(inst.l - inst.k + 1, inst.k, E.v(-2));
        add_term(inst.l - inst.k - 1, inst.k + 1, -E.v(-4));
        add_term(inst.k - inst.l + 1, inst.l, E.v(-2));
        add_term(inst.k - inst.l - 1, inst.l + 1, -E.v(-4));
        return lhs - rhs;
    }
    if (inst.id == "iDR5") {
        if (cartan(c, inst.mu, inst.nu) != -1) throw std::invalid_argument("iDR5 needs c = -1");
        HallElt lhs = G.serre_S(inst.k1, inst.k2, inst.l, inst.mu, inst.nu).scaled(two);
        Scalar fac = (one - E.sca(q)) * (one - E.sca(q));
        HallElt rhs = G.serre_R(inst.k1, inst.k2, inst.l, inst.mu, inst.nu).scaled(fac);
        return lhs - rhs;
    }
    throw std::invalid_argument("unknown relation id: " + inst.id);
}

VerifyRecord Verifier::check_relation(const RelationInstance& inst, bool perturb) {
    VerifyRecord rec;
    rec.id = inst.id;
    rec.params = inst.params();
    if (ctx().t() > 2 &&
        (inst.mu.star || inst.nu.star))
        rec.transport = "collapse";
    auto t0 = std::chrono::steady_clock::now();
    try {
        HallElt res = relation_residual(inst, perturb);
        bool consumed = false;
        if (!perturb) {
            for (auto& ci : G_->consumed()) {
                if (inst.id == "iDR2" && ci.matches("iDR2", inst.mu, inst.nu, inst.m, 0, inst.l))
                    consumed = true;
                if (inst.id == "iDR3b" && inst.mu == inst.nu &&
                    ci.matches("iDR3b", inst.mu, inst.nu, 0, inst.k, inst.l))
                    consumed = true;
            }
        }
        if (res.is_zero())
            rec.status = consumed ? "consumed-by-bootstrap" : "holds";
        else {
            rec.status = "fails";
            rec.residual = res.dump(ctx());
        }
    } catch (const std::exception& e) {
        rec.status = std::string("skipped: ") + e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<RelationInstance> Verifier::relation_grid(const std::string& filter) const {
    const Ctx& c = ctx();
    int kg = c.caps.index_grid;
    int mg = c.caps.max_series;
    std::vector<RelationInstance> out;
    auto vs = vertices();
    bool star_only = filter == "star";
    bool tube_only = filter == "tube";
    auto want_pair = [&](const Vertex& a, const Vertex& b) {
        if (star_only) return a.star && b.star;
        if (tube_only) return !a.star && !b.star;
        return true;
    };
    for (auto& mu : vs)
        for (auto& nu : vs) {
            if (!want_pair(mu, nu)) continue;
            int cij = cartan(c, mu, nu);
            for (long m = 1; m <= mg; ++m)
                for (long n = m; n <= mg; ++n)
                    if (!(nu < mu))
                        out.push_back({"iDR1b", mu, nu, m, n, 0, 0, 0, 0});
            for (long m = 1; m <= mg; ++m)
                for (long l = -kg; l <= kg; ++l) out.push_back({"iDR2", mu, nu, m, 0, 0, l, 0, 0});
            if (cij == 0 && !(nu < mu))
                for (long k = -kg; k <= kg; ++k)
                    for (long l = -kg; l <= kg; ++l) out.push_back({"iDR4", mu, nu, 0, 0, k, l, 0, 0});
            if (cij == -1)
                for (long k = -kg; k <= kg; ++k)
                    for (long l = -kg; l <= kg; ++l) out.push_back({"iDR3a", mu, nu, 0, 0, k, l, 0, 0});
            if (mu == nu)
                for (long k = -kg; k <= kg; ++k)
                    for (long l = k; l <= kg; ++l) out.push_back({"iDR3b", mu, nu, 0, 0, k, l, 0, 0});
            if (cij == -1)
                for (long k1 = -kg; k1 <= kg; ++k1)
                    for (long k2 = k1; k2 <= kg; ++k2)
                        for (long l = -kg; l <= kg; ++l)
                            out.push_back({"iDR5", mu, nu, 0, 0, 0, l, k1, k2});
        }
    return out;
}

std::vector<VerifyRecord> Verifier::lemma_suite(const std::string& which) {
    GeneratorSet& G = *G_;
    Engine& E = G.engine();
    const Ctx& c = ctx();
    long q = c.q;
    Scalar one = Scalar::one(q);
    std::vector<VerifyRecord> out;
    auto record = [&](const std::string& id, const std::string& params, const HallElt& residual) {
        VerifyRecord r;
        r.id = id;
        r.params = params;
        r.status = residual.is_zero() ? "holds" : "fails";
        if (!residual.is_zero()) r.residual = residual.dump(c);
        out.push_back(std::move(r));
    };
    auto Spart = [&](int i, int top, int len) {
        PointId p;
        p.exceptional = true;
        p.branch = i;
        p.deg = 1;
        return CohClass::tor(p, TubeClass::uniserial(top, len, c.weights[i - 1]));
    };
    auto O = [&](long l) { return CohClass::line(LVec::c_mult(c, l)); };
    auto elt = [&](const CohClass& m) {
        return HallElt::term(q, m, K0Class::zero(c), one);
    };

    if (which == "middle-ending") {
        // [[O(lc)], [S_{ij}^{(k)}]] = [[O(lc)], [S_{ij}^{(j)} + S_{i,0}^{(k-j)}]]
        // and the same against [S_{i,0}^{(r p_i)}]
        for (int i = 1; i <= c.t(); ++i) {
            int p = c.weights[i - 1];
            if (p < 2 || p > 3) continue;
            for (int j = 1; j < p; ++j)
                for (int k = j + 1; k <= p; ++k) {
                    CohClass uni = Spart(i, j, k);
                    CohClass split = Spart(i, j, j).direct_sum(Spart(i, 0, k - j));
                    for (long l : {0L, 1L}) {
                        HallElt lhs = E.bracket(elt(O(l)), elt(uni), one);
                        HallElt rhs = E.bracket(elt(O(l)), elt(split), one);
                        record("lem:OSij", "i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                               " k=" + std::to_string(k) + " l=" + std::to_string(l),
                               lhs - rhs);
                    }
                    for (long r = 1; r <= 1; ++r) {
                        CohClass srp = Spart(i, 0, (int)r * p);
                        HallElt lhs = E.bracket(elt(srp), elt(uni), one);
                        HallElt rhs = E.bracket(elt(srp), elt(split), one);
                        record("lem:Sipiij", "i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                                 " k=" + std::to_string(k) + " r=" + std::to_string(r),
                               lhs - rhs);
                    }
                }
        }
        return out;
    }
    if (which == "pi-plus-one") {
        // [[S_{i,1}^{(p+1)}] - [S_{i,1} + S_{i,0}^{(p)}], [O(lc)]]_{v^-1}
        //    = v [[S_{i,1}], [O((l+1)c)]]_v
        for (int i = 1; i <= c.t(); ++i) {
            int p = c.weights[i - 1];
            if (p < 2) continue;
            for (long l : {0L, 1L}) {
                HallElt x = elt(Spart(i, 1, p + 1)) - elt(Spart(i, 1, 1).direct_sum(Spart(i, 0, p)));
                HallElt lhs = E.mul(x, elt(O(l))) - E.mul(elt(O(l)), x).scaled(E.v(-1));
                HallElt rhs = E.bracket(elt(Spart(i, 1, 1)), elt(O(l + 1)), E.v(1)).scaled(E.v(1));
                record("lem:pi+1-co", "i=" + std::to_string(i) + " l=" + std::to_string(l), lhs - rhs);
            }
        }
        return out;
    }
    if (which == "theta-B-four-term") {
        // [[S_0^{(rn)}], B_{1,-1}] + q [[S_0^{((r-2)n)}], B_{1,-1}] C
        //   = [[S_0^{((r-1)n)}], B_{1,0}]_{v^2} + q [[S_0^{((r-1)n)}], B_{1,-2}]_{v^-2} C
        for (int i = 1; i <= 1; ++i) {
            int n = c.weights[i - 1];
            if (n < 2 || n > 3) continue;
            Vertex v1 = Vertex::branch(i, 1);
            auto srn = [&](long r) { return r > 0 ? elt(Spart(i, 0, (int)(r * n))) : (r == 0 ? HallElt::one(q) : HallElt(q)); };
            for (long r = 0; r <= 3; ++r) {
                HallElt lhs = E.bracket(srn(r), G.B(v1, -1), one) +
                              E.bracket(srn(r - 2), G.B(v1, -1), one)
                                  .shifted(K0Class::delta(c))
                                  .scaled(E.sca(q));
                HallElt rhs = E.bracket(srn(r - 1), G.B(v1, 0), E.v(2)) +
                              E.bracket(srn(r - 1), G.B(v1, -2), E.v(-2))
                                  .shifted(K0Class::delta(c))
                                  .scaled(E.sca(q));
                record("lem:theta-B-4term", "r=" + std::to_string(r), lhs - rhs);
            }
        }
        return out;
    }
    if (which == "level-one-pi") {
        // [pi_{[i,j],1}, [O(lc)]] = (v^-j/(v-v^-1)) [[S_{i,0}^{(p_i)}], [O(lc)]];
        // [pi_{[i,j],1}, [S_{i,0}^{(r p_i)}]] = 0
        for (int i = 1; i <= c.t(); ++i) {
            int p = c.weights[i - 1];
            if (p < 2) continue;
            for (int j = 1; j <= p; ++j) {
                // rebuild pi via Theta relation: pi_j = sum over classes; reuse
                // the generator-side construction through Theta seeds
                // (exercised via Theta(v,1) = pi_{j+1} - (v+v^-1) pi_j + pi_{j-1})
                // here check the displayed identities directly
                HallElt pij(q);
                {
                    // reconstruct pi_{[i,j],1} inline
                    PointId pt;
                    pt.exceptional = true;
                    pt.branch = i;
                    pt.deg = 1;
                    const Tube& T = tube_at(c, pt);
                    std::vector<int> dimvec(p, 1);
                    for (auto& M : T.classes_with_dim(dimvec)) {
                        bool ok = true;
                        for (int s : T.socle(M)) {
                            int label = s == 0 ? p : s;
                            if (label > j) { ok = false; break; }
                        }
                        if (!ok) continue;
                        long e = T.end_dim(M);
                        Scalar coeff = -E.v(-j) / (E.v(1) - E.v(-1)) * E.sca(e % 2 ? -1 : 1);
                        pij = pij + HallElt::term(q, CohClass::tor(pt, M), K0Class::zero(c), coeff);
                    }
                }
                for (long l : {0L, 1L}) {
                    HallElt lhs = E.bracket(pij, elt(O(l)), one);
                    HallElt rhs = E.bracket(elt(Spart(i, 0, p)), elt(O(l)), one)
                                      .scaled(E.v(-j) / (E.v(1) - E.v(-1)));
                    record("lem:pi-and-o", "i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                               " l=" + std::to_string(l),
                           lhs - rhs);
                }
                HallElt lhs2 = E.bracket(pij, elt(Spart(i, 0, p)), one);
                record("lem:pi-and-Srp", "i=" + std::to_string(i) + " j=" + std::to_string(j), lhs2);
            }
        }
        return out;
    }
    if (which == "lem-A1") {
        // Theta+- recursions and the S_10/S_11 exchange identities, branch 1
        int p = c.weights[0];
        LVec x1 = LVec::x_gen(c, 1);
        auto theta_pm = [&](long m, bool plus) {
            if (m < 0) return HallElt(q);
            LVec a = plus ? LVec::zero(c) : x1;
            LVec b = plus ? LVec::c_mult(c, m).add(c, x1) : LVec::c_mult(c, m);
            SectionSpace sp = section_basis(c, a, b);
            Scalar front = one / (E.sca((q - 1) * (q - 1)) * E.v(m - 1));
            HallElt acc(q);
            long total = 1;
            for (int ii = 0; ii < sp.dim(); ++ii) total *= q;
            for (long code = 1; code < total; ++code) {
                std::vector<int> coeffs(sp.dim());
                long x = code;
                for (int ii = 0; ii < sp.dim(); ++ii) { coeffs[ii] = (int)(x % q); x /= q; }
                TorsionData tor = cokernel_of_section(c, a, b, coeffs);
                CohClass M;
                M.torsion = std::move(tor);
                M.canonicalize();
                acc = acc + HallElt::term(q, M, K0Class::zero(c), front);
            }
            return acc;
        };
        K0Class a11 = K0Class::simple(c, 1, 1);
        K0Class delta = K0Class::delta(c);
        for (long m = 0; m <= 3; ++m) {
            // S_10andTheta: [Theta_{*,m}, [S_{1,0}^{(p-1)}]]_{v^-2}
            //   = (v-v^-1)(Theta^-_{m+1} + Theta^+_{m-1} K_{delta - a11})
            HallElt lhs = E.bracket(G.Theta(Vertex::star_v(), m), elt(Spart(1, 0, p - 1)), E.v(-2));
            HallElt rhs = (theta_pm(m + 1, false) +
                           theta_pm(m - 1, true).shifted(delta - a11))
                              .scaled(E.v(1) - E.v(-1));
            record("lem:S10andTheta", "m=" + std::to_string(m), lhs - rhs);
            // S_11andTheta: [[S_{1,1}], Theta_{*,m}]_{v^-2}
            //   = ((q-1)/q) Theta^+_m + (q-1) Theta^-_m K_{a11}
            HallElt lhs2 = E.bracket(elt(Spart(1, 1, 1)), G.Theta(Vertex::star_v(), m), E.v(-2));
            HallElt rhs2 = theta_pm(m, true).scaled(E.sca(q - 1) / E.sca(q)) +
                           theta_pm(m, false).shifted(a11).scaled(E.sca(q - 1));
            record("lem:S11andTheta", "m=" + std::to_string(m), lhs2 - rhs2);
            // Theta+: Theta^+_m = q Theta^+_{m-2} C + (q/(q-1)) [[S_{1,1}], Theta_m]_{v^-2}
            //          - (q v/(q-1)) [Theta_{m-1}, [S_{1,0}^{(p-1)}]]_{v^-2} K_{a11}
            HallElt tp = theta_pm(m - 2, true).shifted(delta).scaled(E.sca(q)) +
                         E.bracket(elt(Spart(1, 1, 1)), G.Theta(Vertex::star_v(), m), E.v(-2))
                             .scaled(E.sca(q) / E.sca(q - 1)) -
                         E.bracket(G.Theta(Vertex::star_v(), m - 1), elt(Spart(1, 0, p - 1)), E.v(-2))
                             .shifted(a11)
                             .scaled(E.sca(q) * E.v(1) / E.sca(q - 1));
            record("lem:Theta+", "m=" + std::to_string(m), theta_pm(m, true) - tp);
            // Theta-: Theta^-_m = q Theta^-_{m-2} C + (v/(q-1)) [Theta_{m-1}, [S_{1,0}^{(p-1)}]]_{v^-2}
            //          - (q/(q-1)) [[S_{1,1}], Theta_{m-2}]_{v^-2} K_{delta - a11}
            HallElt tm = theta_pm(m - 2, false).shifted(delta).scaled(E.sca(q)) +
                         E.bracket(G.Theta(Vertex::star_v(), m - 1), elt(Spart(1, 0, p - 1)), E.v(-2))
                             .scaled(E.v(1) / E.sca(q - 1)) -
                         E.bracket(elt(Spart(1, 1, 1)), G.Theta(Vertex::star_v(), m - 2), E.v(-2))
                             .shifted(delta - a11)
                             .scaled(E.sca(q) / E.sca(q - 1));
            record("lem:Theta-", "m=" + std::to_string(m), theta_pm(m, false) - tm);
        }
        return out;
    }
    if (which == "lem-l0") {
        // [[[S_{1,1}]], H_{*,r}] = ([r]/r)([M_{r delta + a11}] + [M_{r delta - a11}] K_{a11})
        // [H_{*,r}, [[S_{1,0}^{(p-1)}]]] = ([r]/r)([M_{(r+1)delta - a11}] + [M_{(r-1)delta + a11}] K_{delta - a11})
        K0Class a11 = K0Class::simple(c, 1, 1);
        K0Class delta = K0Class::delta(c);
        auto mset = [&](int kind, long r) {
            HallElt acc(q);
            if (r <= 0) {
                if (kind == 0 && r == 0) return acc;  // empty
                if (r <= 0) return acc;
            }
            for (auto& M : G.mrd_set(kind, 1, r)) {
                Scalar coeff = n_factor((long)M.torsion.begin()->second.num_parts() - 1, 1, q);
                acc = acc + E.normalize_dbl(M).scaled(coeff);
            }
            return acc;
        };
        for (long r = 1; r <= 3; ++r) {
            Scalar coef = quantum_int(r, q) / E.sca(r);
            HallElt lhs = E.bracket(E.normalize_dbl(Spart(1, 1, 1)), G.H(Vertex::star_v(), r), one);
            HallElt rhs = (mset(0, r) + mset(1, r).shifted(a11)).scaled(coef);
            record("lem:S1H", "r=" + std::to_string(r), lhs - rhs);
            int p = c.weights[0];
            HallElt lhs2 = E.bracket(G.H(Vertex::star_v(), r), E.normalize_dbl(Spart(1, 0, p - 1)), one);
            HallElt rhs2 = (mset(1, r + 1) + mset(0, r - 1).shifted(delta - a11)).scaled(coef);
            record("lem:S0H", "r=" + std::to_string(r), lhs2 - rhs2);
        }
        return out;
    }
    if (which == "lem-image") {
        // lem:image1: -(1/(q-1)^2) [B_{1,0}, B_{1,-r}]_{v^2} K_{r delta - a11}
        //   = v^-1 sum_{M in M_{r delta}} n(l(M)-1) [[M]]
        //     + (v/(q-1)) sum_{|lam|=r} n(l(lam)) [[S_{1,0}^{(lam)}]]
        //     + v sum_{a+|nu|=r} n(l(nu)) sum_{u in nu} phi_{a,u} [[...]] K_{a11}
        // verified in the assembled form of the imaginary-root recursion:
        //   -([B_{1,0},B_{1,-r}]_{v^2} + [B_{1,-r+1},B_{1,-1}]_{v^2}) K_{r delta - a11}/(q-1)^2
        //   = Theta_{1,r} + v^-2 ... (prop:imageroot induction identity)
        Vertex v1 = Vertex::branch(1, 1);
        K0Class a11 = K0Class::simple(c, 1, 1);
        K0Class delta = K0Class::delta(c);
        Scalar fac = one / ((one - E.sca(q)) * (one - E.sca(q)));
        for (long r = 2; r <= 3; ++r) {
            HallElt lhs = (E.bracket(G.B(v1, 0), G.B(v1, -r), E.v(2)) +
                           E.bracket(G.B(v1, -r + 1), G.B(v1, -1), E.v(2)))
                              .shifted(delta.scaled(r) - a11)
                              .scaled(-fac);
            HallElt rhs = G.Theta(v1, r) - G.Theta(v1, r - 2).shifted(delta).scaled(E.v(-2));
            record("lem:image-recursion", "r=" + std::to_string(r), lhs - rhs);
        }
        return out;
    }
    if (which == "hxm") {
        for (long m = 1; m <= 2; ++m) {
            HallElt sum(q);
            for (int d = 1; d <= m; ++d) {
                if (m % d) continue;
                for (auto& x : c.gf->closed_points(d)) sum = sum + G.h_point(x, m);
            }
            record("lem:Hxm", "m=" + std::to_string(m), G.H(Vertex::star_v(), m) - sum);
        }
        return out;
    }
    if (which == "twist-independence") {
        for (long m = 0; m <= 3; ++m) {
            HallElt d = G.theta_star_at_shift(m, 0) - G.theta_star_at_shift(m, 1);
            record("lem:theta-shift", "m=" + std::to_string(m), d);
        }
        return out;
    }
    throw std::invalid_argument("unknown lemma suite: " + which);
}

std::vector<VerifyRecord> Verifier::negative_control() {
    const Ctx& c = ctx();
    std::vector<VerifyRecord> out;
    std::vector<RelationInstance> insts;
    Vertex star = Vertex::star_v();
    insts.push_back({"iDR1b", star, star, 1, 2, 0, 0, 0, 0});
    insts.push_back({"iDR2", star, star, 1, 0, 0, 0, 0, 0});
    insts.push_back({"iDR3b", star, star, 0, 0, 0, 0, 0, 0});
    // find a branch vertex for the cross relations
    Vertex br;
    bool have_branch = false;
    for (int i = 1; i <= c.t() && !have_branch; ++i)
        if (c.weights[i - 1] >= 2) {
            br = Vertex::branch(i, 1);
            have_branch = true;
        }
    if (have_branch) {
        insts.push_back({"iDR3a", star, br, 0, 0, 0, 0, 0, 0});
        insts.push_back({"iDR5", star, br, 0, 0, 0, 0, 0, 1});
    }
    // a pair with vanishing Cartan entry, when the graph has one
    {
        bool done = false;
        for (int i = 1; i <= c.t() && !done; ++i)
            for (int i2 = i + 1; i2 <= c.t() && !done; ++i2)
                if (c.weights[i - 1] >= 2 && c.weights[i2 - 1] >= 2) {
                    insts.push_back({"iDR4", Vertex::branch(i, 1), Vertex::branch(i2, 1), 0, 0, 0, 0, 0, 0});
                    done = true;
                }
    }
    for (auto& inst : insts) {
        VerifyRecord rec = check_relation(inst, true);
        // a perturbed template must NOT hold
        if (rec.status == "holds" || rec.status == "consumed-by-bootstrap")
            rec.status = "fails (perturbation not detected)";
        else if (rec.status == "fails")
            rec.status = "holds";  // sensitivity confirmed
        rec.id = "negctl:" + rec.id;
        rec.residual.clear();
        out.push_back(std::move(rec));
    }
    return out;
}

bool Verifier::perp_member(int i, const CohClass& m) const {
    const Ctx& c = ctx();
    Engine& E = G_->engine();
    // membership: Hom(M, S) = 0 = Ext^1(M, S) for all S in the set
    // {S_{i,j} : 2 <= j <= p_i - 1} union {S_{i',j'} : i' != i}
    for (int i2 = 1; i2 <= c.t(); ++i2) {
        int p2 = c.weights[i2 - 1];
        for (int j2 = 1; j2 <= p2 - 1; ++j2) {
            if (i2 == i && (j2 < 2)) continue;
            PointId pt;
            pt.exceptional = true;
            pt.branch = i2;
            pt.deg = 1;
            CohClass s = CohClass::tor(pt, TubeClass::uniserial(j2, 1, p2));
            if (E.hom_dim_k(m, s) != 0 || E.ext_dim_k(m, s) != 0) return false;
        }
    }
    return true;
}

HallElt Verifier::perp_transport(int i, const PerpModel& pm, Engine& te, const HallElt& x) const {
    const Ctx& c = ctx();
    const Ctx& t = pm.target;
    int p = c.weights[i - 1];
    long q = c.q;
    PointId src_pt;
    src_pt.exceptional = true;
    src_pt.branch = i;
    src_pt.deg = 1;
    PointId dst_pt = t.gf->point_at_infinity();
    // ordinary markers for the other branches: z-coordinates carry over when
    // i == 1 (no reparametrization needed for the verification configs)
    if (i != 1) throw std::runtime_error("perpendicular transport implemented for branch 1");
    auto map_tube = [&](const TubeClass& tc) {
        TubeClass out;
        for (auto& [top, len] : tc.parts) {
            // dictionary: S_{i,1}^{(b p + 1)} -> S'_{1,1}^{(2b+1)};
            //             S_{i,0}^{(a p - 1)} -> S'_{1,0}^{(2a-1)};
            //             S_{i,0}^{(a p)} -> S'_{1,0}^{(2a)};
            //             S_{i,1}^{(a p)} -> S'_{1,1}^{(2a)}
            if (top == 1 && len % p == 1)
                out.add_part(1, 2 * (len / p) + 1, 2);
            else if (top == 0 && len % p == p - 1)
                out.add_part(0, 2 * ((len + 1) / p) - 1, 2);
            else if (top == 0 && len % p == 0)
                out.add_part(0, 2 * (len / p), 2);
            else if (top == 1 && len % p == 0)
                out.add_part(1, 2 * (len / p), 2);
            else
                throw std::runtime_error("object not in the perpendicular subcategory");
        }
        return out;
    };
    auto map_class = [&](const K0Class& k) {
        K0Class padded = K0Class::zero(c) + k;
        K0Class outk = K0Class::zero(t);
        outk.o = padded.o;
        outk.oc = padded.oc;
        for (int i2 = 0; i2 < c.t(); ++i2)
            for (size_t j2 = 0; j2 < padded.s[i2].size(); ++j2)
                if (padded.s[i2][j2]) {
                    if (i2 != i - 1 || j2 != 0)
                        throw std::runtime_error("class not in the perpendicular lattice");
                    outk.s[0][0] = padded.s[i2][j2];
                }
        return outk;
    };
    HallElt out(q);
    for (auto& [bk, s] : x.terms()) {
        CohClass m2;
        for (auto& l : bk.m.lines) {
            if ([&] {
                    for (int i2 = 0; i2 < c.t(); ++i2)
                        if (l.a[i2]) return true;
                    return false;
                }())
                throw std::runtime_error("line twist not in the perpendicular sector");
            m2.lines.push_back(LVec::c_mult(t, l.l));
        }
        for (auto& [pt, tc] : bk.m.torsion) {
            if (pt.exceptional && pt.branch == i) {
                m2.torsion[dst_pt] = map_tube(tc);
            } else if (pt.exceptional) {
                // S_{i',0}^{(r p_i')} -> ordinary S_x^{(r)} at the marker z
                int p2 = c.weights[pt.branch - 1];
                TubeClass mapped;
                for (auto& [top, len] : tc.parts) {
                    if (top != 0 || len % p2 != 0)
                        throw std::runtime_error("object not in the perpendicular subcategory");
                    mapped.add_part(0, len / p2, 1);
                }
                int z = t.gf->branch_coordinate(2);  // z = 0 marker stays
                PointId q2 = pt.branch == 2 ? t.gf->point_of_linear(z)
                                            : t.gf->point_of_linear(c.gf->branch_coordinate(pt.branch));
                m2.torsion[q2] = mapped;
            } else {
                m2.torsion[pt] = tc;
            }
        }
        m2.canonicalize();
        out.add_term({m2, map_class(bk.k)}, s);
    }
    (void)te;
    return out;
}

VerifyRecord Verifier::check_serre_perp(const RelationInstance& inst) {
    VerifyRecord rec;
    rec.id = inst.id;
    rec.params = inst.params();
    rec.transport = "perp(2,1)";
    auto t0 = std::chrono::steady_clock::now();
    try {
        const Ctx& c = ctx();
        int i = inst.mu.star ? inst.nu.i : inst.mu.i;
        PerpModel pm{Ctx(c.q, {2, 1}, {}, c.caps), i};
        Engine te(pm.target);
        GeneratorSet tg(te);
        // assemble both sides in the target model using the mapped generators:
        // B_{*,l} -> [O(lc')], B_{[i,1],l} -> B'_{[1,1],l}, Theta likewise
        Vertex star = Vertex::star_v();
        Vertex b1 = Vertex::branch(1, 1);
        auto mapv = [&](const Vertex& v) { return v.star ? star : b1; };
        // membership check on the generator supports
        for (auto which : {inst.mu, inst.nu}) {
            if (which.star) continue;
            if (which.j != 1) throw std::runtime_error("not perpendicular: j != 1");
        }
        HallElt lhs = tg.serre_S(inst.k1, inst.k2, inst.l, mapv(inst.mu), mapv(inst.nu));
        Scalar fac = (Scalar::one(c.q) - Scalar::of_int(c.q, c.q)) *
                     (Scalar::one(c.q) - Scalar::of_int(c.q, c.q));
        HallElt rhs = tg.serre_R(inst.k1, inst.k2, inst.l, mapv(inst.mu), mapv(inst.nu)).scaled(fac);
        HallElt res = lhs - rhs;
        rec.status = res.is_zero() ? "holds" : "fails";
        if (!res.is_zero()) rec.residual = res.dump(pm.target);
    } catch (const std::exception& e) {
        rec.status = std::string("skipped: ") + e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace ihall
