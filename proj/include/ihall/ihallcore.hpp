#pragma once

#include "ihall/linebundles.hpp"
#include "ihall/scalar.hpp"

#include <map>
#include <memory>
#include <string>

namespace ihall {

// Isomorphism class of a coherent sheaf: a multiset of line-bundle twists
// plus per-point torsion.
struct CohClass {
    std::vector<LVec> lines;  // kept sorted
    TorsionData torsion;

    static CohClass zero() { return {}; }
    static CohClass line(const LVec& v) {
        CohClass m;
        m.lines.push_back(v);
        return m;
    }
    static CohClass tor(const PointId& p, const TubeClass& t) {
        CohClass m;
        if (t.total_length()) m.torsion[p] = t;
        return m;
    }

    void canonicalize();
    CohClass direct_sum(const CohClass& o) const;
    int rank() const { return (int)lines.size(); }
    bool is_zero() const { return lines.empty() && torsion.empty(); }
    bool pure_torsion() const { return lines.empty(); }
    bool pure_lines() const { return torsion.empty(); }
    int torsion_length() const;

    bool operator==(const CohClass& o) const { return lines == o.lines && torsion == o.torsion; }
    bool operator<(const CohClass& o) const {
        if (!(lines == o.lines)) return lines < o.lines;
        return torsion < o.torsion;
    }
    std::string str(const Ctx& c) const;
};

// Basis symbol [M]*[K_alpha].
struct BasisKey {
    CohClass m;
    K0Class k;
    bool operator<(const BasisKey& o) const {
        if (!(m == o.m)) return m < o.m;
        return k < o.k;
    }
    bool operator==(const BasisKey& o) const { return m == o.m && k == o.k; }
};

// Finite scalar combination of basis symbols.
class HallElt {
public:
    HallElt() = default;
    explicit HallElt(long q) : q_(q) {}

    static HallElt one(long q) { return term(q, CohClass::zero(), K0Class(), Scalar::one(q)); }
    static HallElt term(long q, CohClass m, K0Class k, Scalar coeff);

    void add_term(const BasisKey& key, const Scalar& s);
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    long q() const { return q_; }

    HallElt operator+(const HallElt& o) const;
    HallElt operator-(const HallElt& o) const;
    HallElt scaled(const Scalar& s) const;
    HallElt shifted(const K0Class& alpha) const;  // multiply by [K_alpha]
    bool operator==(const HallElt& o) const { return q_ == o.q_ && terms_ == o.terms_; }

    const std::map<BasisKey, Scalar>& terms() const { return terms_; }

    std::string dump(const Ctx& c) const;  // one term per line, deterministic

private:
    long q_ = 0;
    std::map<BasisKey, Scalar> terms_;
};

// The product engine for one ambient configuration.
class Engine {
public:
    explicit Engine(const Ctx& c) : ctx_(c) {}
    const Ctx& ctx() const { return ctx_; }

    K0Class class_of(const CohClass& m) const;
    long hom_dim_k(const CohClass& a, const CohClass& b) const;  // dim over F_q
    long ext_dim_k(const CohClass& a, const CohClass& b) const;
    mpz_class aut_order(const CohClass& m) const;

    // [A] * [B] in the iHall basis
    const HallElt& basis_product(const CohClass& A, const CohClass& B);
    HallElt mul(const HallElt& x, const HallElt& y);
    HallElt bracket(const HallElt& x, const HallElt& y, const Scalar& twist);
    HallElt normalize_dbl(const CohClass& m) const;  // [[M]] = [M]/|Aut M|

    Scalar sca(long n) const { return Scalar::of_int(n, ctx_.q); }
    Scalar v(long k) const { return v_power(k, ctx_.q); }

private:
    struct PtProduct;  // single-point torsion product

    HallElt product_uncached(const CohClass& A, const CohClass& B);
    HallElt tor_tor_product(const CohClass& A, const CohClass& B);
    HallElt line_line_product(const LVec& a, const LVec& b);
    HallElt generic_product(const CohClass& A, const CohClass& B);
    HallElt transported_product(const CohClass& A, const CohClass& B);

    // middle distribution |Ext^1(N, L)_M| for L pure torsion
    std::map<CohClass, mpz_class> middles_torsion(const CohClass& N, const CohClass& L);
    // middle distribution when L has a bundle part (only needed for N = A, L = B)
    std::map<CohClass, mpz_class> middles_mixed(const CohClass& N, const CohClass& L);
    // extensions of N by a single line bundle O(w), enumerated through a
    // resolution of N by line bundles of low twist
    std::map<CohClass, mpz_class> middles_line_quotient(const CohClass& N, const LVec& w);
    // #{injective maps X -> M with cokernel isomorphic to N}
    mpz_class count_embeddings_with_cokernel(const CohClass& X, const CohClass& M,
                                             const CohClass& N);

    std::map<std::pair<CohClass, CohClass>, HallElt> cache_;
    std::map<std::pair<CohClass, CohClass>, std::map<CohClass, mpz_class>> middle_cache_;
    Ctx ctx_;
    // transport targets for t >= 3 sectors, keyed by (kept branch, weight)
    std::map<std::pair<int, int>, std::pair<Ctx, std::unique_ptr<Engine>>> transports_;
};

}  // namespace ihall
