#pragma once

#include "ihall/groundfield.hpp"

#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace ihall {

struct Caps {
    int torsion_len = 12;      // max torsion length per point
    int line_count = 3;        // max number of line summands in one class
    int index_grid = 2;        // default |k|,|l| grid bound for relations
    int max_series = 3;        // default m,r bound for Theta/H indices
    long hom_budget = 1 << 21; // max |Hom(A,B)| enumerated in one product
};

// Ambient configuration: the weight data and ground field shared by all
// modules. Weight type (p_1,...,p_t) with t >= 2.
struct Ctx {
    long q = 2;
    std::vector<int> weights;
    std::shared_ptr<GroundField> gf;
    Caps caps;
    int p_lcm = 1;

    Ctx() = default;
    Ctx(long q_, std::vector<int> p_, std::vector<int> extra_lambda = {}, Caps caps_ = {});

    int t() const { return (int)weights.size(); }
    int weight(int i) const { return weights.at(i - 1); }  // branches are 1-based
};

// An element of the grading group L(p) in normal form: l*c + sum a_i x_i
// with 0 <= a_i < p_i.
struct LVec {
    long l = 0;
    std::vector<int> a;

    static LVec zero(const Ctx& c) { return LVec{0, std::vector<int>(c.t(), 0)}; }
    static LVec c_mult(const Ctx& c, long m) { return LVec{m, std::vector<int>(c.t(), 0)}; }
    static LVec x_gen(const Ctx& c, int branch, int mult = 1);

    LVec add(const Ctx& c, const LVec& o) const;
    LVec sub(const Ctx& c, const LVec& o) const;
    LVec neg(const Ctx& c) const;
    // total degree under deg(x_i) = p/p_i, deg(c) = p
    long degree(const Ctx& c) const;
    bool is_effective() const { return l >= 0; }  // normal form has all a_i >= 0

    bool operator==(const LVec& o) const { return l == o.l && a == o.a; }
    bool operator<(const LVec& o) const { return l != o.l ? l < o.l : a < o.a; }
    std::string str() const;
};

// An element of K_0(coh X) on the basis {O, O(c), S_{ij} (1 <= j < p_i)};
// delta = O(c) - O and S_{i,p_i} = delta - sum_{j<p_i} S_{ij}.
struct K0Class {
    long o = 0, oc = 0;
    std::vector<std::vector<long>> s;  // s[i-1][j-1], j = 1..p_i-1

    static K0Class zero(const Ctx& c);
    static K0Class structure_sheaf(const Ctx& c);  // class of O
    static K0Class delta(const Ctx& c);
    static K0Class simple(const Ctx& c, int branch, int j);  // S_{ij}, j in Z_{p_i} (0 means p_i)
    static K0Class line(const Ctx& c, const LVec& x);        // class of O(x)
    // class of the uniserial S_{i,top}^{(len)} (top in 0..p_i-1, 0 = p_i)
    static K0Class uniserial(const Ctx& c, int branch, int top, int len);

    K0Class operator+(const K0Class& rhs) const;
    K0Class operator-(const K0Class& rhs) const;
    K0Class operator-() const;
    K0Class scaled(long k) const;
    bool operator==(const K0Class& rhs) const;
    bool operator!=(const K0Class& rhs) const { return !(*this == rhs); }
    bool operator<(const K0Class& rhs) const;
    bool is_zero() const;

    long rank() const { return o + oc; }
    long degree(const Ctx& c) const;
    std::string str(const Ctx& c) const;
};

long euler_form(const Ctx& c, const K0Class& x, const K0Class& y);
long symmetrized_euler(const Ctx& c, const K0Class& x, const K0Class& y);

}  // namespace ihall
