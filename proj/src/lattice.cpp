#include "ihall/lattice.hpp"

#include <stdexcept>

namespace ihall {

Ctx::Ctx(long q_, std::vector<int> p_, std::vector<int> extra_lambda, Caps caps_)
    : q(q_), weights(std::move(p_)), caps(caps_) {
    if (weights.size() < 2) throw std::invalid_argument("weight type needs t >= 2");
    for (int w : weights)
        if (w < 1) throw std::invalid_argument("weights must be positive");
    gf = std::make_shared<GroundField>(q, (int)weights.size(), std::move(extra_lambda));
    p_lcm = 1;
    for (int w : weights) p_lcm = std::lcm(p_lcm, w);
}

LVec LVec::x_gen(const Ctx& c, int branch, int mult) {
    LVec v = zero(c);
    v.a[branch - 1] = mult;
    // normalize
    return v.add(c, zero(c));
}

LVec LVec::add(const Ctx& c, const LVec& o) const {
    LVec r;
    r.l = l + o.l;
    r.a.resize(c.t());
    for (int i = 0; i < c.t(); ++i) {
        int s = a[i] + o.a[i];
        int p = c.weights[i];
        int carry = s >= 0 ? s / p : -((-s + p - 1) / p);
        r.a[i] = s - carry * p;
        r.l += carry;
    }
    return r;
}

LVec LVec::sub(const Ctx& c, const LVec& o) const { return add(c, o.neg(c)); }

LVec LVec::neg(const Ctx& c) const {
    LVec r;
    r.l = -l;
    r.a.resize(c.t());
    for (int i = 0; i < c.t(); ++i) {
        if (a[i] == 0) {
            r.a[i] = 0;
        } else {
            r.a[i] = c.weights[i] - a[i];
            r.l -= 1;
        }
    }
    return r;
}

long LVec::degree(const Ctx& c) const {
    long d = l * (long)c.p_lcm;
    for (int i = 0; i < c.t(); ++i) d += (long)a[i] * (c.p_lcm / c.weights[i]);
    return d;
}

std::string LVec::str() const {
    std::string s = std::to_string(l) + "c";
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i]) s += "+" + std::to_string(a[i]) + "x" + std::to_string(i + 1);
    return s;
}

K0Class K0Class::zero(const Ctx& c) {
    K0Class k;
    k.s.resize(c.t());
    for (int i = 0; i < c.t(); ++i) k.s[i].assign(std::max(0, c.weights[i] - 1), 0);
    return k;
}

K0Class K0Class::structure_sheaf(const Ctx& c) {
    K0Class k = zero(c);
    k.o = 1;
    return k;
}

K0Class K0Class::delta(const Ctx& c) {
    K0Class k = zero(c);
    k.o = -1;
    k.oc = 1;
    return k;
}

K0Class K0Class::simple(const Ctx& c, int branch, int j) {
    int p = c.weights[branch - 1];
    int jj = ((j % p) + p) % p;
    K0Class k = zero(c);
    if (jj == 0) {
        // S_{i,p_i} = delta - sum_{j<p_i} S_{ij}
        k = delta(c);
        for (int v = 1; v < p; ++v) k.s[branch - 1][v - 1] -= 1;
    } else {
        k.s[branch - 1][jj - 1] = 1;
    }
    return k;
}

K0Class K0Class::line(const Ctx& c, const LVec& x) {
    // O(x) = O + l*delta + sum_i sum_{k=1..a_i} S_{ik}
    K0Class k = structure_sheaf(c) + delta(c).scaled(x.l);
    for (int i = 1; i <= c.t(); ++i)
        for (int v = 1; v <= x.a[i - 1]; ++v) k = k + simple(c, i, v);
    return k;
}

K0Class K0Class::uniserial(const Ctx& c, int branch, int top, int len) {
    K0Class k = zero(c);
    for (int v = 0; v < len; ++v) k = k + simple(c, branch, top - v);
    return k;
}

namespace {
// pad two coefficient tables to a common shape (a default-constructed class
// acts as zero of any shape)
void pad_shapes(std::vector<std::vector<long>>& a, std::vector<std::vector<long>>& b) {
    size_t rows = std::max(a.size(), b.size());
    a.resize(rows);
    b.resize(rows);
    for (size_t i = 0; i < rows; ++i) {
        size_t cols = std::max(a[i].size(), b[i].size());
        a[i].resize(cols, 0);
        b[i].resize(cols, 0);
    }
}
}  // namespace

K0Class K0Class::operator+(const K0Class& rhs) const {
    K0Class k = *this;
    K0Class r = rhs;
    pad_shapes(k.s, r.s);
    k.o += r.o;
    k.oc += r.oc;
    for (size_t i = 0; i < k.s.size(); ++i)
        for (size_t j = 0; j < k.s[i].size(); ++j) k.s[i][j] += r.s[i][j];
    return k;
}

K0Class K0Class::operator-(const K0Class& rhs) const { return *this + (-rhs); }

K0Class K0Class::operator-() const { return scaled(-1); }

K0Class K0Class::scaled(long m) const {
    K0Class k = *this;
    k.o *= m;
    k.oc *= m;
    for (auto& row : k.s)
        for (auto& v : row) v *= m;
    return k;
}

bool K0Class::operator==(const K0Class& rhs) const {
    if (o != rhs.o || oc != rhs.oc) return false;
    K0Class a = *this, b = rhs;
    pad_shapes(a.s, b.s);
    return a.s == b.s;
}

bool K0Class::operator<(const K0Class& rhs) const {
    if (o != rhs.o) return o < rhs.o;
    if (oc != rhs.oc) return oc < rhs.oc;
    K0Class a = *this, b = rhs;
    pad_shapes(a.s, b.s);
    return a.s < b.s;
}

bool K0Class::is_zero() const {
    if (o || oc) return false;
    for (auto& row : s)
        for (auto v : row)
            if (v) return false;
    return true;
}

long K0Class::degree(const Ctx& c) const {
    long d = oc * (long)c.p_lcm;
    for (size_t i = 0; i < s.size() && i < (size_t)c.t(); ++i)
        for (size_t j = 0; j < s[i].size(); ++j) d += s[i][j] * (c.p_lcm / c.weights[i]);
    return d;
}

std::string K0Class::str(const Ctx& c) const {
    // rendered on the basis {O, delta, alpha_ij}
    long nO = o + oc;
    long nd = oc;
    std::string out;
    auto term = [&](long v, const std::string& sym) {
        if (!v) return;
        if (!out.empty()) out += v > 0 ? " + " : " - ";
        else if (v < 0) out += "-";
        long av = v < 0 ? -v : v;
        if (av != 1) out += std::to_string(av) + "*";
        out += sym;
    };
    term(nO, "O");
    term(nd, "delta");
    for (size_t i = 0; i < s.size() && i < (size_t)c.t(); ++i)
        for (size_t j = 0; j < s[i].size(); ++j)
            term(s[i][j], "a[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]");
    return out.empty() ? "0" : out;
}

long euler_form(const Ctx& c, const K0Class& x0, const K0Class& y0) {
    // coordinates on {O, delta, S_ij (j < p_i)}
    K0Class x = K0Class::zero(c) + x0;
    K0Class y = K0Class::zero(c) + y0;
    long xO = x.o + x.oc, xd = x.oc;
    long yO = y.o + y.oc, yd = y.oc;
    long acc = 0;
    acc += xO * yO;        // <O,O> = 1
    acc += xO * yd;        // <O,delta> = 1
    acc -= xd * yO;        // <delta,O> = -1
    // <O, S_ij> = [j = p_i] -> never on stored coords; <S_ij, O> = -[j = 1]
    for (int i = 0; i < c.t(); ++i)
        if (c.weights[i] >= 2) acc -= x.s[i][0] * yO;
    // <S_ij, S_ij'> = [j = j'] - [j = j'+1 mod p_i]
    for (int i = 0; i < c.t(); ++i) {
        int p = c.weights[i];
        for (int j = 1; j < p; ++j)
            for (int j2 = 1; j2 < p; ++j2) {
                long coef = (j == j2 ? 1 : 0) - ((j % p) == ((j2 + 1) % p) ? 1 : 0);
                if (coef) acc += coef * x.s[i][j - 1] * y.s[i][j2 - 1];
            }
    }
    return acc;
}

long symmetrized_euler(const Ctx& c, const K0Class& x, const K0Class& y) {
    return euler_form(c, x, y) + euler_form(c, y, x);
}

}  // namespace ihall
