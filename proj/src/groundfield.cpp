#include "ihall/groundfield.hpp"

#include "ihall/scalar.hpp"

#include <algorithm>
#include <stdexcept>

namespace ihall {

FieldTable FieldTable::prime(int p) {
    FieldTable F;
    F.n_ = p;
    F.p_ = p;
    F.addt_.resize(p * p);
    F.mult_.resize(p * p);
    F.negt_.resize(p);
    F.invt_.assign(p, 0);
    for (int a = 0; a < p; ++a) {
        F.negt_[a] = (p - a) % p;
        for (int b = 0; b < p; ++b) {
            F.addt_[a * p + b] = (a + b) % p;
            F.mult_[a * p + b] = (a * b) % p;
        }
    }
    for (int a = 1; a < p; ++a)
        for (int b = 1; b < p; ++b)
            if (a * b % p == 1) F.invt_[a] = b;
    return F;
}

FieldTable FieldTable::extension(const FieldTable& base, const std::vector<int>& monic) {
    int d = (int)monic.size() - 1;
    int m = base.size();
    int n = 1;
    for (int i = 0; i < d; ++i) n *= m;
    FieldTable F;
    F.n_ = n;
    F.p_ = base.characteristic();
    F.addt_.resize((size_t)n * n);
    F.mult_.resize((size_t)n * n);
    F.negt_.resize(n);
    F.invt_.assign(n, 0);

    auto digits = [&](int x) {
        std::vector<int> v(d);
        for (int i = 0; i < d; ++i) { v[i] = x % m; x /= m; }
        return v;
    };
    auto encode = [&](const std::vector<int>& v) {
        int x = 0;
        for (int i = d - 1; i >= 0; --i) x = x * m + v[i];
        return x;
    };

    for (int a = 0; a < n; ++a) {
        auto va = digits(a);
        std::vector<int> vn(d);
        for (int i = 0; i < d; ++i) vn[i] = base.neg(va[i]);
        F.negt_[a] = encode(vn);
        for (int b = a; b < n; ++b) {
            auto vb = digits(b);
            std::vector<int> vs(d);
            for (int i = 0; i < d; ++i) vs[i] = base.add(va[i], vb[i]);
            int s = encode(vs);
            F.addt_[(size_t)a * n + b] = s;
            F.addt_[(size_t)b * n + a] = s;
            // polynomial product reduced mod monic
            std::vector<int> prod(2 * d - 1, 0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    prod[i + j] = base.add(prod[i + j], base.mul(va[i], vb[j]));
            for (int k = 2 * d - 2; k >= d; --k) {
                int c = prod[k];
                if (c == 0) continue;
                prod[k] = 0;
                for (int i = 0; i < d; ++i)
                    prod[k - d + i] = base.sub(prod[k - d + i], base.mul(c, monic[i]));
            }
            std::vector<int> vp(prod.begin(), prod.begin() + d);
            int pr = encode(vp);
            F.mult_[(size_t)a * n + b] = pr;
            F.mult_[(size_t)b * n + a] = pr;
        }
    }
    for (int a = 1; a < n; ++a) {
        if (F.invt_[a]) continue;
        for (int b = 1; b < n; ++b)
            if (F.mult_[(size_t)a * n + b] == 1) { F.invt_[a] = b; F.invt_[b] = a; break; }
    }
    return F;
}

int FieldTable::inv(int a) const {
    if (a == 0) throw std::domain_error("field inverse of zero");
    return invt_[a];
}

int FieldTable::pow(int a, long e) const {
    if (e < 0) { a = inv(a); e = -e; }
    int r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Poly poly_trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

int poly_deg(const Poly& a) {
    for (int i = (int)a.size() - 1; i >= 0; --i)
        if (a[i] != 0) return i;
    return -1;
}

Poly poly_mul(const FieldTable& F, const Poly& a, const Poly& b) {
    if (poly_deg(a) < 0 || poly_deg(b) < 0) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
    }
    return poly_trim(c);
}

Poly poly_mod(const FieldTable& F, Poly a, const Poly& b) {
    a = poly_trim(a);
    Poly bb = poly_trim(b);
    if (bb.empty()) throw std::domain_error("poly_mod by zero");
    int lead_inv = F.inv(bb.back());
    while ((int)a.size() >= (int)bb.size() && !a.empty()) {
        int c = F.mul(a.back(), lead_inv);
        size_t off = a.size() - bb.size();
        for (size_t i = 0; i < bb.size(); ++i)
            a[off + i] = F.sub(a[off + i], F.mul(c, bb[i]));
        a = poly_trim(a);
    }
    return a;
}

Poly poly_monic(const FieldTable& F, Poly a) {
    a = poly_trim(a);
    if (a.empty()) return a;
    int c = F.inv(a.back());
    for (auto& x : a) x = F.mul(x, c);
    return a;
}

Poly poly_gcd(const FieldTable& F, Poly a, Poly b) {
    a = poly_trim(a);
    b = poly_trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(F, a, b);
        a = b;
        b = r;
    }
    return poly_monic(F, a);
}

namespace {

// Lexicographically least monic irreducible of degree d over F, where the
// non-leading coefficients are ordered by their base-|F| integer encoding.
std::vector<Poly> monic_irreducibles(const FieldTable& F, int d,
                                     const std::vector<std::vector<Poly>>& lower) {
    std::vector<Poly> out;
    int m = F.size();
    long total = 1;
    for (int i = 0; i < d; ++i) total *= m;
    for (long code = 0; code < total; ++code) {
        Poly f(d + 1, 0);
        long x = code;
        for (int i = 0; i < d; ++i) { f[i] = (int)(x % m); x /= m; }
        f[d] = 1;
        bool irred = true;
        for (int e = 1; irred && 2 * e <= d; ++e)
            for (const Poly& g : lower[e]) {
                if (poly_deg(poly_mod(F, f, g)) < 0) { irred = false; break; }
            }
        if (irred) out.push_back(f);
    }
    return out;
}

}  // namespace

GroundField::GroundField(long q, int t, std::vector<int> extra_lambda) : q_(q), t_(t) {
    validate_ground_q(q);
    if (t < 2) throw std::invalid_argument("need at least two marked points (t >= 2)");
    if (t > q) throw std::invalid_argument("branch parameters require t <= q");
    // realize F_q over its prime field
    long p = 2;
    while (q % p != 0) ++p;
    FieldTable Fp = FieldTable::prime((int)p);
    if (q == p) {
        Fq_ = std::make_shared<FieldTable>(Fp);
    } else {
        int e = 0;
        for (long m = q; m > 1; m /= p) ++e;
        std::vector<std::vector<Poly>> lower(e + 1);
        for (int dd = 1; dd <= e; ++dd) lower[dd] = monic_irreducibles(Fp, dd, lower);
        Fq_ = std::make_shared<FieldTable>(FieldTable::extension(Fp, lower[e].front()));
    }
    // branch coordinates: lambda_2 = 0, lambda_3 = 1, then caller-supplied or
    // the remaining field elements in index order
    branch_z_.clear();
    if (t >= 2) branch_z_.push_back(0);
    if (t >= 3) branch_z_.push_back(1);
    std::vector<int> used = {0, 1};
    size_t gi = 0;
    for (int i = 4; i <= t; ++i) {
        int z = -1;
        if (gi < extra_lambda.size()) {
            z = extra_lambda[gi++];
        } else {
            for (int c = 2; c < (int)q; ++c)
                if (std::find(used.begin(), used.end(), c) == used.end() &&
                    std::find(branch_z_.begin(), branch_z_.end(), c) == branch_z_.end()) { z = c; break; }
        }
        if (z < 0 || z >= (int)q || z == 0 || z == 1 ||
            std::find(branch_z_.begin(), branch_z_.end(), z) != branch_z_.end())
            throw std::invalid_argument("branch parameters must be distinct elements outside {0,1}");
        branch_z_.push_back(z);
    }
}

const FieldTable& GroundField::extension_field(int d) const {
    if (d <= 1) return *Fq_;
    auto it = ext_.find(d);
    if (it == ext_.end()) {
        const auto& irr = irreducibles(d);
        it = ext_.emplace(d, std::make_shared<FieldTable>(FieldTable::extension(*Fq_, irr.front()))).first;
    }
    return *it->second;
}

int GroundField::branch_coordinate(int i) const {
    if (i < 2 || i > t_) throw std::invalid_argument("branch_coordinate: branch 2..t");
    return branch_z_[i - 2];
}

const std::vector<Poly>& GroundField::irreducibles(int d) const {
    if (d < 1 || d > 8) throw std::invalid_argument("irreducible table degree cap is 8");
    auto it = irr_.find(d);
    if (it == irr_.end()) {
        std::vector<std::vector<Poly>> lower(d + 1);
        for (int dd = 1; dd <= d; ++dd) {
            auto cached = irr_.find(dd);
            lower[dd] = (cached != irr_.end()) ? cached->second : monic_irreducibles(*Fq_, dd, lower);
            irr_[dd] = lower[dd];
        }
        it = irr_.find(d);
    }
    return it->second;
}

std::vector<std::pair<Poly, int>> GroundField::factor_poly(const Poly& f) const {
    Poly g = poly_monic(*Fq_, f);
    if (g.empty()) throw std::invalid_argument("factor_poly: zero polynomial");
    std::vector<std::pair<Poly, int>> out;
    for (int d = 1; d <= poly_deg(g) && poly_deg(g) > 0; ++d) {
        for (const Poly& irr : irreducibles(d)) {
            if (poly_deg(g) < d) break;
            int mult = 0;
            while (poly_deg(poly_mod(*Fq_, g, irr)) < 0) {
                ++mult;
                // exact division
                Poly quot(poly_deg(g) - d + 1, 0);
                Poly rem = g;
                int lead_inv = Fq_->inv(irr.back());
                for (int k = poly_deg(rem) - d; k >= 0; --k) {
                    int c = Fq_->mul(rem[k + d], lead_inv);
                    quot[k] = c;
                    for (int i = 0; i <= d; ++i)
                        rem[k + i] = Fq_->sub(rem[k + i], Fq_->mul(c, irr[i]));
                }
                g = poly_trim(quot);
            }
            if (mult) out.push_back({irr, mult});
        }
    }
    return out;
}

PointId GroundField::point_at_infinity() const {
    PointId p;
    p.exceptional = true;
    p.branch = 1;
    p.deg = 1;
    return p;
}

PointId GroundField::point_of_linear(int lambda_z) const {
    for (int i = 2; i <= t_; ++i)
        if (branch_z_[i - 2] == lambda_z) {
            PointId p;
            p.exceptional = true;
            p.branch = i;
            p.deg = 1;
            return p;
        }
    PointId p;
    p.exceptional = false;
    p.poly = {Fq_->neg(lambda_z), 1};
    p.deg = 1;
    return p;
}

std::vector<std::pair<PointId, int>> GroundField::factor_binary_form(const std::vector<int>& coeffs) const {
    int m = (int)coeffs.size() - 1;
    int top = -1;
    for (int j = m; j >= 0; --j)
        if (coeffs[j] != 0) { top = j; break; }
    if (top < 0) throw std::invalid_argument("factor_binary_form: zero form");
    std::vector<std::pair<PointId, int>> out;
    if (m - top > 0) out.push_back({point_at_infinity(), m - top});
    Poly g(coeffs.begin(), coeffs.begin() + top + 1);
    if (poly_deg(g) > 0) {
        for (auto& [irr, mult] : factor_poly(g)) {
            if (poly_deg(irr) == 1) {
                // z - lambda with lambda = -irr[0]
                out.push_back({point_of_linear(Fq_->neg(irr[0])), mult});
            } else {
                PointId p;
                p.exceptional = false;
                p.poly = irr;
                p.deg = poly_deg(irr);
                out.push_back({p, mult});
            }
        }
    }
    return out;
}

std::vector<PointId> GroundField::closed_points(int d) const {
    std::vector<PointId> out;
    if (d == 1) {
        out.push_back(point_at_infinity());
        for (int z = 0; z < (int)q_; ++z) out.push_back(point_of_linear(z));
    } else {
        for (const Poly& irr : irreducibles(d)) {
            PointId p;
            p.exceptional = false;
            p.poly = irr;
            p.deg = d;
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

long GroundField::count_coprime_pairs(int a, int b, bool exclude_divisor_x1) const {
    if (a + b > 10) throw std::invalid_argument("count_coprime_pairs: degree cap exceeded");
    long qa = 1, qb = 1;
    for (int i = 0; i <= a; ++i) qa *= q_;
    for (int i = 0; i <= b; ++i) qb *= q_;
    long count = 0;
    // a binary form of degree n is a coefficient vector c_0..c_n for
    // c_0 y1^n + ... + c_n y2^n; multiplicity at infinity is n - deg_z
    auto decode = [&](long code, int n) {
        std::vector<int> c(n + 1);
        for (int i = 0; i <= n; ++i) { c[i] = (int)(code % q_); code /= q_; }
        return c;
    };
    for (long ca = 1; ca < qa; ++ca) {
        auto J = decode(ca, a);
        int degJ = poly_deg(J);
        if (exclude_divisor_x1 && degJ != a) continue;  // y1 | J
        for (long cb = 1; cb < qb; ++cb) {
            auto L = decode(cb, b);
            int degL = poly_deg(L);
            if (degJ < a && degL < b) continue;  // common factor at infinity
            Poly g = poly_gcd(*Fq_, Poly(J.begin(), J.begin() + degJ + 1),
                              Poly(L.begin(), L.begin() + degL + 1));
            if (poly_deg(g) == 0) ++count;
        }
    }
    return count;
}

std::string PointId::str() const {
    if (exceptional) return "lambda" + std::to_string(branch);
    std::string s = "(";
    for (size_t i = 0; i < poly.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(poly[i]);
    }
    return s + ")";
}

}  // namespace ihall
