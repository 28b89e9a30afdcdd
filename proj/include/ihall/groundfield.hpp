#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ihall {

// Table-backed finite field arithmetic. Elements are indices 0..n-1 with
// 0 and 1 the additive and multiplicative identities.
class FieldTable {
public:
    static FieldTable prime(int p);
    // Extension of `base` by a monic irreducible with ascending coefficient
    // list `monic` (length d+1, leading entry 1). Elements are encoded in
    // base `base.size()` digit order, so base-field elements keep their index.
    static FieldTable extension(const FieldTable& base, const std::vector<int>& monic);

    int size() const { return n_; }
    int characteristic() const { return p_; }
    int add(int a, int b) const { return addt_[a * n_ + b]; }
    int sub(int a, int b) const { return addt_[a * n_ + negt_[b]]; }
    int mul(int a, int b) const { return mult_[a * n_ + b]; }
    int neg(int a) const { return negt_[a]; }
    int inv(int a) const;
    int pow(int a, long e) const;

private:
    FieldTable() = default;
    int n_ = 0, p_ = 0;
    std::vector<int> addt_, mult_, negt_, invt_;
};

// Dense univariate polynomials over a FieldTable, ascending coefficients.
using Poly = std::vector<int>;

Poly poly_trim(Poly a);
int poly_deg(const Poly& a);  // -1 for zero
Poly poly_mul(const FieldTable& F, const Poly& a, const Poly& b);
Poly poly_mod(const FieldTable& F, Poly a, const Poly& b);
Poly poly_gcd(const FieldTable& F, Poly a, Poly b);  // monic gcd
Poly poly_monic(const FieldTable& F, Poly a);

// A closed point of the (weighted) projective line. Exceptional points are
// the marked branch points lambda_i (degree one); an ordinary point is keyed
// by a monic irreducible polynomial in the affine coordinate z = y2/y1,
// so y1 vanishes at lambda_1 = infinity and y2 at lambda_2 = 0.
struct PointId {
    bool exceptional = false;
    int branch = 0;   // 1..t when exceptional
    Poly poly;        // monic irreducible over F_q when ordinary
    int deg = 1;      // residue degree d_x

    bool operator==(const PointId& o) const {
        return exceptional == o.exceptional && branch == o.branch && poly == o.poly;
    }
    bool operator<(const PointId& o) const {
        if (exceptional != o.exceptional) return exceptional > o.exceptional;
        if (exceptional) return branch < o.branch;
        if (poly.size() != o.poly.size()) return poly.size() < o.poly.size();
        return poly < o.poly;
    }
    std::string str() const;
};

// Ground-field context: F_q, its extensions, the irreducible tables, and the
// classification of closed points for a fixed set of branch parameters.
class GroundField {
public:
    // lambda[i] is the z-coordinate of branch i+3 (lambda_1 = infinity and
    // lambda_2 = 0, lambda_3 = 1 are fixed by normalization).
    GroundField(long q, int t, std::vector<int> extra_lambda = {});

    long q() const { return q_; }
    int num_branches() const { return t_; }
    const FieldTable& field() const { return *Fq_; }
    const FieldTable& extension_field(int d) const;

    // z-coordinate of exceptional branch i (2..t); branch 1 is infinity.
    int branch_coordinate(int i) const;

    // Monic irreducibles of the given degree, lexicographic order.
    const std::vector<Poly>& irreducibles(int d) const;

    // Factor a univariate polynomial into monic irreducibles by trial division.
    std::vector<std::pair<Poly, int>> factor_poly(const Poly& f) const;

    // Factor the binary form c_0 y1^m + c_1 y1^(m-1) y2 + ... + c_m y2^m.
    // Returns (point, multiplicity) pairs; multiplicities weighted by degree
    // sum to m. The y1-multiplicity is reported at lambda_1 = infinity.
    std::vector<std::pair<PointId, int>> factor_binary_form(const std::vector<int>& coeffs) const;

    // All closed points of residue degree d (including exceptional ones at d=1).
    std::vector<PointId> closed_points(int d) const;

    // Brute-force count of coprime pairs of nonzero binary forms of degrees
    // (a, b); with exclude_divisor_x1 only pairs whose first form is not
    // divisible by the coordinate vanishing at infinity.
    long count_coprime_pairs(int a, int b, bool exclude_divisor_x1) const;

    PointId point_at_infinity() const;
    PointId point_of_linear(int lambda_z) const;  // the point z = lambda_z

private:
    long q_;
    int t_;
    std::vector<int> branch_z_;  // z-coordinates for branches 2..t (index 0 -> branch 2)
    std::shared_ptr<FieldTable> Fq_;
    mutable std::map<int, std::shared_ptr<FieldTable>> ext_;
    mutable std::map<int, std::vector<Poly>> irr_;
};

}  // namespace ihall
