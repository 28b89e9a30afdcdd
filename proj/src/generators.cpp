#include "ihall/generators.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace ihall {

namespace {

PointId branch_point(const Ctx& c, int i) {
    if (i == 1) return c.gf->point_at_infinity();
    return c.gf->point_of_linear(c.gf->branch_coordinate(i));
}

// partitions of n (parts descending)
std::vector<std::vector<int>> partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxp) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        for (int p = std::min(left, maxp); p >= 1; --p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

}  // namespace

int cartan(const Ctx& c, const Vertex& a, const Vertex& b) {
    if (a == b) return 2;
    auto adjacent = [&](const Vertex& x, const Vertex& y) {
        if (x.star) return !y.star && y.j == 1;
        if (y.star) return x.j == 1;
        return x.i == y.i && std::abs(x.j - y.j) == 1;
    };
    return adjacent(a, b) ? -1 : 0;
}

K0Class GeneratorSet::alpha_of(const Vertex& v) const {
    const Ctx& c = ctx();
    if (v.star) return K0Class::structure_sheaf(c);
    return K0Class::simple(c, v.i, v.j);
}

HallElt GeneratorSet::torus(const K0Class& alpha) const {
    return HallElt::term(ctx().q, CohClass::zero(), alpha, Scalar::one(ctx().q));
}

const HallElt& GeneratorSet::B(const Vertex& v, long l) {
    auto key = std::make_pair(v, l);
    auto it = bcache_.find(key);
    if (it == bcache_.end()) it = bcache_.emplace(key, build_B(v, l)).first;
    return it->second;
}

const HallElt& GeneratorSet::Theta(const Vertex& v, long r) {
    auto key = std::make_pair(v, r);
    auto it = tcache_.find(key);
    if (it == tcache_.end()) it = tcache_.emplace(key, build_Theta(v, r)).first;
    return it->second;
}

const HallElt& GeneratorSet::H(const Vertex& v, long r) {
    auto key = std::make_pair(v, r);
    auto it = hcache_.find(key);
    if (it == hcache_.end()) it = hcache_.emplace(key, build_H(v, r)).first;
    return it->second;
}

HallElt GeneratorSet::build_B(const Vertex& v, long l) {
    const Ctx& c = ctx();
    long q = c.q;
    if (v.star) {
        return HallElt::term(q, CohClass::line(LVec::c_mult(c, l)), K0Class::zero(c),
                             Scalar::one(q));
    }
    int i = v.i, j = v.j;
    int n = c.weights[i - 1];
    if (j < 1 || j >= n) throw std::invalid_argument("branch vertex out of range");
    PointId pt = branch_point(c, i);
    if (l == 0) {
        return HallElt::term(q, CohClass::tor(pt, TubeClass::uniserial(j, 1, n)),
                             K0Class::zero(c), Scalar::one(q));
    }
    if (l == -1) {
        // B_{j,-1} = v^{-j+1} sum_{M in M_{j+1, delta - alpha_j}} (-1)^{dim End M} [M] * [K_{delta-alpha_j}]^{-1}
        std::vector<int> dimvec(n, 1);
        dimvec[j] = 0;
        const Tube& T = tube_at(c, pt);
        HallElt acc(q);
        K0Class shift = (K0Class::simple(c, i, j) - K0Class::delta(c));
        for (auto& M : socle_constrained(i, dimvec, j + 1)) {
            long e = T.end_dim(M);
            Scalar coeff = E_->v(-j + 1) * E_->sca(e % 2 == 0 ? 1 : -1);
            acc = acc + HallElt::term(q, CohClass::tor(pt, M), shift, coeff);
        }
        return acc;
    }
    // recursion through [Theta_1, B_l] = [2] B_{l+1} - [2] B_{l-1} * C
    Scalar two = quantum_int(2, q);
    if (l > 0) {
        HallElt br = E_->bracket(Theta(v, 1), B(v, l - 1), Scalar::one(q));
        HallElt res = br.scaled(Scalar::one(q) / two) +
                      B(v, l - 2).shifted(K0Class::delta(c));
        consumed_.push_back({"iDR2", v, v, 1, 0, l - 1});
        return res;
    }
    // l <= -2
    HallElt br = E_->bracket(Theta(v, 1), B(v, l + 1), Scalar::one(q));
    HallElt res = (B(v, l + 2) - br.scaled(Scalar::one(q) / two)).shifted(-K0Class::delta(c));
    consumed_.push_back({"iDR2", v, v, 1, 0, l + 1});
    return res;
}

HallElt GeneratorSet::pi_j1(int i, int j) const {
    const Ctx& c = ctx();
    long q = c.q;
    if (j == 0) return HallElt(q);
    int n = c.weights[i - 1];
    PointId pt = branch_point(c, i);
    const Tube& T = tube_at(c, pt);
    std::vector<int> dimvec(n, 1);
    Scalar front = -E_->v(-j) / (E_->v(1) - E_->v(-1));
    HallElt acc(q);
    for (auto& M : socle_constrained(i, dimvec, j)) {
        long e = T.end_dim(M);
        acc = acc + HallElt::term(q, CohClass::tor(pt, M), K0Class::zero(c),
                                  front * E_->sca(e % 2 == 0 ? 1 : -1));
    }
    return acc;
}

std::vector<TubeClass> GeneratorSet::socle_constrained(int i, const std::vector<int>& dimvec,
                                                       int jmax) const {
    const Ctx& c = ctx();
    int n = c.weights[i - 1];
    PointId pt = branch_point(c, i);
    const Tube& T = tube_at(c, pt);
    std::vector<TubeClass> out;
    for (auto& M : T.classes_with_dim(dimvec)) {
        bool ok = true;
        for (int s : T.socle(M)) {
            // socle must lie in S_1 + ... + S_jmax, vertex 0 meaning S_n
            int label = s == 0 ? n : s;
            if (label > jmax) { ok = false; break; }
        }
        if (ok) out.push_back(M);
    }
    return out;
}

HallElt GeneratorSet::build_Theta(const Vertex& v, long r) {
    const Ctx& c = ctx();
    long q = c.q;
    if (r < 0) return HallElt(q);
    if (r == 0)
        return HallElt::term(q, CohClass::zero(), K0Class::zero(c),
                             Scalar::one(q) / (E_->v(1) - E_->v(-1)));
    if (v.star) return theta_star(r);
    int i = v.i, j = v.j;
    if (r == 1) {
        HallElt t = pi_j1(i, j + 1) - pi_j1(i, j).scaled(E_->v(1) + E_->v(-1)) + pi_j1(i, j - 1);
        return t;
    }
    // solve relation iDR3b at (k, l) = (0, r-1) for Theta_r
    Scalar one = Scalar::one(q);
    HallElt lhs = E_->bracket(B(v, 0), B(v, r), E_->v(-2)) -
                  E_->bracket(B(v, 1), B(v, r - 1), E_->v(2)).scaled(E_->v(-2));
    Scalar fac = (one - E_->sca(q)) * (one - E_->sca(q));
    K0Class alpha = alpha_of(v);
    K0Class delta = K0Class::delta(c);
    HallElt rhs_known(q);
    rhs_known = rhs_known - Theta(v, r - 2).shifted(delta + alpha).scaled(fac * E_->v(-4));
    if (r == 2)
        rhs_known = rhs_known + Theta(v, 0).shifted(delta.scaled(r - 1) + alpha).scaled(fac * E_->v(-2));
    // lhs = fac * v^{-2} Theta_r * K_alpha + rhs_known
    HallElt residual = lhs - rhs_known;
    HallElt theta = residual.scaled((one / fac) * E_->v(2)).shifted(-alpha);
    consumed_.push_back({"iDR3b", v, v, 0, 0, r - 1});
    return theta;
}

HallElt GeneratorSet::theta_star(long m) const { return theta_star_at_shift(m, 0); }

HallElt GeneratorSet::theta_star_at_shift(long m, long s) const {
    const Ctx& c = ctx();
    long q = c.q;
    if (m < 0) return HallElt(q);
    if (m == 0)
        return HallElt::term(q, CohClass::zero(), K0Class::zero(c),
                             Scalar::one(q) / (E_->v(1) - E_->v(-1)));
    LVec a = LVec::c_mult(c, s), b = LVec::c_mult(c, m + s);
    SectionSpace sp = section_basis(c, a, b);
    Scalar front = Scalar::one(q) / (E_->sca((q - 1) * (q - 1)) * E_->v(m - 1));
    HallElt acc(q);
    long total = 1;
    for (int i = 0; i < sp.dim(); ++i) total *= q;
    for (long code = 1; code < total; ++code) {
        std::vector<int> coeffs(sp.dim());
        long x = code;
        for (int i = 0; i < sp.dim(); ++i) { coeffs[i] = (int)(x % q); x /= q; }
        TorsionData tor = cokernel_of_section(c, a, b, coeffs);
        CohClass M;
        M.torsion = std::move(tor);
        M.canonicalize();
        acc = acc + HallElt::term(q, M, K0Class::zero(c), front);
    }
    return acc;
}

HallElt GeneratorSet::h_point(const PointId& x, long m) const {
    const Ctx& c = ctx();
    long q = c.q;
    int d = x.deg;
    if (m % d != 0) return HallElt(q);
    long md = m / d;
    Scalar front = quantum_int(m, q) * E_->sca(d) / E_->sca(m);
    const Tube& T = tube_at(c, x);
    HallElt acc(q);
    for (auto& lam : partitions((int)md)) {
        // n_x(l(lam) - 1) * [F(S_x^lam)] / |Aut(S_x^lam)| with Aut over F_{q^d}
        TubeClass p1side;
        for (int part : lam) p1side.add_part(0, part, 1);
        Tube jord(x.exceptional ? c.gf->field() : c.gf->extension_field(d), 1);
        mpz_class aut = jord.aut_order(p1side);
        CohClass image;
        if (x.exceptional) {
            int p = c.weights[x.branch - 1];
            TubeClass img;
            for (int part : lam) img.add_part(0, part * p, p);
            image = CohClass::tor(x, img);
        } else {
            TubeClass img;
            for (int part : lam) img.add_part(0, part, 1);
            image = CohClass::tor(x, img);
        }
        Scalar coeff = front * n_factor((long)lam.size() - 1, d, q) *
                       Scalar(mpq_class(1) / mpq_class(aut), 0, q);
        acc = acc + HallElt::term(q, image, K0Class::zero(c), coeff);
    }
    if (md % 2 == 0) {
        Scalar sub = E_->sca(d) * E_->v(-m / 2) * quantum_int(m / 2, q) / E_->sca(m);
        acc = acc - torus(K0Class::delta(c).scaled(m / 2)).scaled(sub);
    }
    return acc;
}

HallElt GeneratorSet::h_star(long m) const {
    const Ctx& c = ctx();
    long q = c.q;
    Scalar front = quantum_int(m, q) / E_->sca(m);
    HallElt acc(q);
    for (int d = 1; d <= m; ++d) {
        if (m % d != 0) continue;
        for (const PointId& x : c.gf->closed_points(d)) {
            long md = m / d;
            for (auto& lam : partitions((int)md)) {
                TubeClass p1side;
                for (int part : lam) p1side.add_part(0, part, 1);
                Tube jord(x.exceptional ? c.gf->field() : c.gf->extension_field(d), 1);
                mpz_class aut = jord.aut_order(p1side);
                CohClass image;
                if (x.exceptional) {
                    int p = c.weights[x.branch - 1];
                    TubeClass img;
                    for (int part : lam) img.add_part(0, part * p, p);
                    image = CohClass::tor(x, img);
                } else {
                    TubeClass img;
                    for (int part : lam) img.add_part(0, part, 1);
                    image = CohClass::tor(x, img);
                }
                Scalar coeff = front * E_->sca(d) * n_factor((long)lam.size() - 1, d, q) *
                               Scalar(mpq_class(1) / mpq_class(aut), 0, q);
                acc = acc + HallElt::term(q, image, K0Class::zero(c), coeff);
            }
        }
    }
    if (m % 2 == 0) {
        acc = acc - torus(K0Class::delta(c).scaled(m / 2)).scaled(front);
    }
    return acc;
}

HallElt GeneratorSet::build_H(const Vertex& v, long r) {
    const Ctx& c = ctx();
    if (r < 1) throw std::invalid_argument("H index must be positive");
    if (v.star) return h_star(r);
    // branch H via the exp/log series from Theta_1..Theta_r
    std::vector<HallElt> thetas;
    for (long m = 1; m <= r; ++m) thetas.push_back(Theta(v, m));
    auto hs = h_from_theta(thetas);
    (void)c;
    return hs[r - 1];
}

std::vector<HallElt> GeneratorSet::h_from_theta(const std::vector<HallElt>& theta) const {
    // (v - v^-1) sum H_m u^m = log(1 + sum (v - v^-1) Theta_m u^m)
    const Ctx& c = ctx();
    long q = c.q;
    size_t cap = theta.size();
    Scalar w = E_->v(1) - E_->v(-1);
    // X_m = (v - v^-1) Theta_m; log series: sum_k (-1)^{k+1}/k X^k
    std::vector<HallElt> X;
    for (auto& t : theta) X.push_back(t.scaled(w));
    std::vector<HallElt> out(cap, HallElt(q));
    // powers: accumulate compositions
    // series[m] = coefficient of u^m in log(1 + X(u))
    std::vector<HallElt> series(cap + 1, HallElt(q));
    std::vector<HallElt> power(cap + 1, HallElt(q));  // X^k coefficients
    // X^1
    for (size_t m = 1; m <= cap; ++m) power[m] = X[m - 1];
    int sign = 1;
    for (size_t k = 1; k <= cap; ++k) {
        Scalar f = E_->sca(sign) / E_->sca((long)k);
        for (size_t m = k; m <= cap; ++m) series[m] = series[m] + power[m].scaled(f);
        // next power
        if (k < cap) {
            std::vector<HallElt> nxt(cap + 1, HallElt(q));
            for (size_t m = k + 1; m <= cap; ++m) {
                HallElt acc(q);
                for (size_t a = k; a < m; ++a) acc = acc + E_->mul(power[a], X[m - a - 1]);
                nxt[m] = acc;
            }
            power = std::move(nxt);
        }
        sign = -sign;
    }
    for (size_t m = 1; m <= cap; ++m) out[m - 1] = series[m].scaled(Scalar::one(q) / w);
    return out;
}

std::vector<HallElt> GeneratorSet::theta_from_h(const std::vector<HallElt>& h) const {
    // 1 + sum (v-v^-1) Theta_m u^m = exp((v-v^-1) sum H_m u^m)
    const Ctx& c = ctx();
    long q = c.q;
    size_t cap = h.size();
    Scalar w = E_->v(1) - E_->v(-1);
    std::vector<HallElt> Y;
    for (auto& t : h) Y.push_back(t.scaled(w));
    std::vector<HallElt> series(cap + 1, HallElt(q));  // exp - 1 coefficients
    std::vector<HallElt> power(cap + 1, HallElt(q));
    for (size_t m = 1; m <= cap; ++m) power[m] = Y[m - 1];
    mpz_class fact = 1;
    for (size_t k = 1; k <= cap; ++k) {
        mpz_fac_ui(fact.get_mpz_t(), (unsigned long)k);
        Scalar f = Scalar(mpq_class(1) / mpq_class(fact), 0, q);
        for (size_t m = k; m <= cap; ++m) series[m] = series[m] + power[m].scaled(f);
        if (k < cap) {
            std::vector<HallElt> nxt(cap + 1, HallElt(q));
            for (size_t m = k + 1; m <= cap; ++m) {
                HallElt acc(q);
                for (size_t a = k; a < m; ++a) acc = acc + E_->mul(power[a], Y[m - a - 1]);
                nxt[m] = acc;
            }
            power = std::move(nxt);
        }
    }
    std::vector<HallElt> out(cap, HallElt(q));
    for (size_t m = 1; m <= cap; ++m) out[m - 1] = series[m].scaled(Scalar::one(q) / w);
    return out;
}

std::vector<CohClass> GeneratorSet::mrd_set(int kind, int i, long r) const {
    const Ctx& c = ctx();
    int p = c.weights[i - 1];
    PointId pt = branch_point(c, i);
    std::vector<CohClass> out;
    auto nu_sets = [&](long total) {
        std::vector<std::vector<int>> ps;
        if (total == 0) {
            ps.push_back({});
            return ps;
        }
        return partitions((int)total);
    };
    if (kind == 0) {
        // { S_{i,1}^{(b p + 1)} + S_{i,0}^{(nu)} : b >= 0, b + |nu| = r }
        for (long b = 0; b <= r; ++b)
            for (auto& nu : nu_sets(r - b)) {
                TubeClass t = TubeClass::uniserial(1, (int)(b * p + 1), p);
                for (int part : nu) t.add_part(0, part * p, p);
                out.push_back(CohClass::tor(pt, t));
            }
    } else if (kind == 1) {
        // { S_{i,0}^{(a p - 1)} + S_{i,0}^{(nu)} : a >= 1, a + |nu| = r }
        for (long a = 1; a <= r; ++a)
            for (auto& nu : nu_sets(r - a)) {
                TubeClass t = TubeClass::uniserial(0, (int)(a * p - 1), p);
                for (int part : nu) t.add_part(0, part * p, p);
                out.push_back(CohClass::tor(pt, t));
            }
    } else {
        // M_{i, r delta}: { S_{i,1}^{(a p)} + S_{i,0}^{(nu)} : a >= 1, a + |nu| = r }
        //   union { S_{i,0}^{(a p - 1)} + S_{i,1}^{(b p + 1)} + S_{i,0}^{(nu)} : a >= 1, b >= 0 }
        for (long a = 1; a <= r; ++a)
            for (auto& nu : nu_sets(r - a)) {
                TubeClass t = TubeClass::uniserial(1, (int)(a * p), p);
                for (int part : nu) t.add_part(0, part * p, p);
                out.push_back(CohClass::tor(pt, t));
            }
        for (long a = 1; a <= r; ++a)
            for (long b = 0; a + b <= r; ++b)
                for (auto& nu : nu_sets(r - a - b)) {
                    TubeClass t = TubeClass::uniserial(0, (int)(a * p - 1), p);
                    t.add_part(1, (int)(b * p + 1), p);
                    for (int part : nu) t.add_part(0, part * p, p);
                    out.push_back(CohClass::tor(pt, t));
                }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

HallElt GeneratorSet::closed_B_i1(int i, long r) {
    const Ctx& c = ctx();
    long q = c.q;
    if (r == 0) return B(Vertex::branch(i, 1), 0);
    HallElt acc(q);
    if (r > 0) {
        for (auto& M : mrd_set(0, i, r)) {
            Scalar coeff = n_factor((long)M.torsion.begin()->second.num_parts() - 1, 1, q);
            acc = acc + E_->normalize_dbl(M).scaled(coeff);
        }
        return acc.scaled(E_->sca(q - 1));
    }
    for (auto& M : mrd_set(1, i, -r)) {
        Scalar coeff = n_factor((long)M.torsion.begin()->second.num_parts() - 1, 1, q);
        acc = acc + E_->normalize_dbl(M).scaled(coeff);
    }
    K0Class shift = K0Class::simple(c, i, 1) - K0Class::delta(c).scaled(-r);
    return acc.scaled(E_->sca(1 - q)).shifted(shift);
}

HallElt GeneratorSet::closed_Theta_i1(int i, long r) {
    const Ctx& c = ctx();
    long q = c.q;
    int p = c.weights[i - 1];
    PointId pt = branch_point(c, i);
    HallElt acc(q);
    // (v/(q-1)) sum_{|lam| = r} n(l(lam)) [[S_{i,0}^{(lam)}]]
    for (auto& lam : partitions((int)r)) {
        TubeClass t;
        for (int part : lam) t.add_part(0, part * p, p);
        CohClass M = CohClass::tor(pt, t);
        acc = acc + E_->normalize_dbl(M).scaled(E_->v(1) / E_->sca(q - 1) *
                                                n_factor((long)lam.size(), 1, q));
    }
    // + v^{-1} sum_{M in M_{i, r delta}} n(l(M) - 1) [[M]]
    for (auto& M : mrd_set(2, i, r)) {
        Scalar coeff = E_->v(-1) * n_factor((long)M.torsion.begin()->second.num_parts() - 1, 1, q);
        acc = acc + E_->normalize_dbl(M).scaled(coeff);
    }
    return acc;
}

HallElt GeneratorSet::serre_S(long k1, long k2, long l, const Vertex& mu, const Vertex& nu) {
    Scalar two = quantum_int(2, ctx().q);
    auto term = [&](long a, long b) {
        HallElt t = E_->mul(E_->mul(B(mu, a), B(mu, b)), B(nu, l));
        t = t - E_->mul(E_->mul(B(mu, a), B(nu, l)), B(mu, b)).scaled(two);
        t = t + E_->mul(E_->mul(B(nu, l), B(mu, a)), B(mu, b));
        return t;
    };
    HallElt s = term(k1, k2);
    if (k1 != k2) s = s + term(k2, k1);
    return s;
}

HallElt GeneratorSet::serre_R(long k1, long k2, long l, const Vertex& mu, const Vertex& nu) {
    const Ctx& c = ctx();
    long q = c.q;
    Scalar two = quantum_int(2, q);
    K0Class delta = K0Class::delta(c);
    auto half = [&](long a, long b) {
        HallElt acc(q);
        // - sum_{p >= 0} v^{2p} [2] [Theta_{mu, b-a-2p-1}, B_{nu, l-1}]_{v^-2} C^{p+1}
        for (long p = 0; b - a - 2 * p - 1 >= 0; ++p) {
            HallElt br = E_->bracket(Theta(mu, b - a - 2 * p - 1), B(nu, l - 1), E_->v(-2));
            acc = acc - br.shifted(delta.scaled(p + 1)).scaled(E_->v(2 * p) * two);
        }
        // - sum_{p >= 1} v^{2p-1} [2] [B_{nu,l}, Theta_{mu, b-a-2p}]_{v^-2} C^p
        for (long p = 1; b - a - 2 * p >= 0; ++p) {
            HallElt br = E_->bracket(B(nu, l), Theta(mu, b - a - 2 * p), E_->v(-2));
            acc = acc - br.shifted(delta.scaled(p)).scaled(E_->v(2 * p - 1) * two);
        }
        // - [B_{nu,l}, Theta_{mu, b-a}]_{v^-2}
        if (b - a >= 0) acc = acc - E_->bracket(B(nu, l), Theta(mu, b - a), E_->v(-2));
        return acc.shifted(delta.scaled(a) + alpha_of(mu));
    };
    HallElt r = half(k1, k2);
    if (k1 != k2) r = r + half(k2, k1);
    return r;
}

}  // namespace ihall
