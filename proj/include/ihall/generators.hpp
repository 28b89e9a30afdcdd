#pragma once

#include "ihall/ihallcore.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ihall {

// A vertex of the star-shaped graph: the central vertex or [i,j].
struct Vertex {
    bool star = true;
    int i = 0, j = 0;
    static Vertex star_v() { return {}; }
    static Vertex branch(int i, int j) { return {false, i, j}; }
    bool operator==(const Vertex& o) const { return star == o.star && i == o.i && j == o.j; }
    bool operator<(const Vertex& o) const {
        if (star != o.star) return star > o.star;
        if (i != o.i) return i < o.i;
        return j < o.j;
    }
    std::string str() const { return star ? "*" : "[" + std::to_string(i) + "," + std::to_string(j) + "]"; }
};

// Cartan entry of the star-shaped graph
int cartan(const Ctx& c, const Vertex& a, const Vertex& b);

// A relation instance consumed by the bootstrap recursion (excluded from
// independent verification tallies).
struct ConsumedInstance {
    std::string rel;  // "iDR2" or "iDR3b"
    Vertex mu, nu;
    long m = 0, k = 0, l = 0;
    bool matches(const std::string& r, const Vertex& a, const Vertex& b, long mm, long kk,
                 long ll) const {
        return rel == r && mu == a && nu == b && m == mm && k == kk && l == ll;
    }
};

// Construction of the Drinfeld-type generators inside the iHall algebra.
class GeneratorSet {
public:
    GeneratorSet(Engine& e) : E_(&e) {}

    const Ctx& ctx() const { return E_->ctx(); }
    Engine& engine() { return *E_; }

    // B_{*,l} = [O(lc)]; branch generators are built by seeds + recursion
    const HallElt& B(const Vertex& v, long l);
    const HallElt& Theta(const Vertex& v, long r);  // r >= 0; constant at 0
    const HallElt& H(const Vertex& v, long r);      // r >= 1

    HallElt torus(const K0Class& alpha) const;   // [K_alpha]
    K0Class alpha_of(const Vertex& v) const;     // alpha_* = O-hat, alpha_ij = S_ij-hat

    // theta_star via a shifted defining sum (s = 0 is the cached default)
    HallElt theta_star_at_shift(long m, long s) const;
    // per-point summand of H_{*,m}
    HallElt h_point(const PointId& x, long m) const;

    // closed forms of Theorem B at [i,1]
    HallElt closed_B_i1(int i, long r);         // r != 0
    HallElt closed_Theta_i1(int i, long r);     // r >= 1
    // the root-vector supports
    std::vector<CohClass> mrd_set(int kind, int i, long r) const;  // 0:+ 1:- 2:imag

    // Serre shorthand: S-hat and R-hat of the relation iDR5
    HallElt serre_S(long k1, long k2, long l, const Vertex& mu, const Vertex& nu);
    HallElt serre_R(long k1, long k2, long l, const Vertex& mu, const Vertex& nu);

    const std::vector<ConsumedInstance>& consumed() const { return consumed_; }

    // exp/log transforms between Theta and H strings (index 1..cap)
    std::vector<HallElt> h_from_theta(const std::vector<HallElt>& theta) const;
    std::vector<HallElt> theta_from_h(const std::vector<HallElt>& h) const;

private:
    HallElt build_B(const Vertex& v, long l);
    HallElt build_Theta(const Vertex& v, long r);
    HallElt build_H(const Vertex& v, long r);
    HallElt theta_star(long m) const;
    HallElt h_star(long m) const;
    HallElt pi_j1(int i, int j) const;  // the level-one pi elements
    std::vector<TubeClass> socle_constrained(int i, const std::vector<int>& dimvec, int jmax) const;

    Engine* E_;
    std::map<std::pair<Vertex, long>, HallElt> bcache_, tcache_, hcache_;
    std::vector<ConsumedInstance> consumed_;
};

}  // namespace ihall
