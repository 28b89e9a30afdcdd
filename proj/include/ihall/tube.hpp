#pragma once

#include "ihall/groundfield.hpp"

#include <gmpxx.h>
#include <map>
#include <string>
#include <vector>

namespace ihall {

// Isomorphism class of a nilpotent representation of the cyclic quiver C_n:
// a multiset of uniserials (top vertex, length). Vertices are residues mod n
// and arrows go j -> j-1, so S_t^(a) has composition factors
// S_t, S_{t-1}, ..., S_{t-a+1} from top to socle.
struct TubeClass {
    std::vector<std::pair<int, int>> parts;  // (top, len), canonically sorted

    static TubeClass uniserial(int top, int len, int n);
    TubeClass& add_part(int top, int len, int n);
    void canonicalize();

    int total_length() const;
    int num_parts() const { return (int)parts.size(); }
    std::vector<int> dim_vector(int n) const;
    // partition of lengths (Jordan type), for n = 1 tubes
    std::vector<int> partition() const;

    bool operator==(const TubeClass& o) const { return parts == o.parts; }
    bool operator!=(const TubeClass& o) const { return parts != o.parts; }
    bool operator<(const TubeClass& o) const { return parts < o.parts; }
    std::string str() const;
};

// Dense matrices over a FieldTable (entries are field indices).
using Mat = std::vector<std::vector<int>>;

// Explicit matrix model of a nilpotent C_n representation over a FieldTable.
struct TubeModel {
    int n = 1;
    std::vector<int> dim;                                 // per-vertex dims
    std::vector<std::vector<std::vector<int>>> arrow;     // arrow[j]: V_j -> V_{j-1}, dim[j-1] x dim[j]
};

// Hom/Ext/Aut machinery for the torsion category at one point, i.e. nilpotent
// representations of C_n over the residue field. All dimensions are over the
// residue field; cardinalities are powers of its size.
class Tube {
public:
    Tube(const FieldTable& F, int n) : F_(&F), n_(n) {}

    int rank() const { return n_; }
    const FieldTable& field() const { return *F_; }
    long residue_size() const { return F_->size(); }

    TubeModel model(const TubeClass& c) const;

    long hom_dim(const TubeClass& a, const TubeClass& b) const;
    long euler(const TubeClass& a, const TubeClass& b) const;  // <a,b> over the residue field
    long ext_dim(const TubeClass& a, const TubeClass& b) const;
    long end_dim(const TubeClass& a) const { return hom_dim(a, a); }

    // |Aut M| as q_d^{dim rad End} * prod |GL_{m_i}(residue field)|
    mpz_class aut_order(const TubeClass& a) const;

    // F^L_{M,N}: brute-force submodule count (the oracle path)
    long hall_number(const TubeClass& L, const TubeClass& M, const TubeClass& N) const;

    // |Ext^1(M,N)_L| via Riedtmann-Peng on top of hall_number (oracle path)
    mpz_class ext_count_with_middle(const TubeClass& M, const TubeClass& N, const TubeClass& L) const;

    // Middle distribution of Ext^1(M,N) by direct cocycle enumeration
    // (independent of hall_number); the values sum to |Ext^1(M,N)|.
    std::map<TubeClass, long> ext_middles(const TubeClass& M, const TubeClass& N) const;

    // classify an explicit model (rank-signature method)
    TubeClass classify(const TubeModel& m) const;

    // all classes with dim vector <= bound componentwise
    std::vector<TubeClass> classes_with_dim_at_most(const std::vector<int>& bound) const;
    // all classes with dim vector exactly `dims`
    std::vector<TubeClass> classes_with_dim(const std::vector<int>& dims) const;

    // socle vertex multiset
    std::vector<int> socle(const TubeClass& a) const;

    // brute-force |Aut| by counting invertible endomorphisms (test oracle)
    mpz_class aut_order_brute(const TubeClass& a) const;

    // explicit basis of the intertwiner space Hom(a, b): per-vertex matrices
    std::vector<std::vector<Mat>> hom_basis(const TubeClass& a, const TubeClass& b) const;
    // kernel / cokernel models of an explicit intertwiner
    TubeModel map_kernel(const TubeModel& A, const TubeModel& B, const std::vector<Mat>& f) const;
    TubeModel map_cokernel(const TubeModel& A, const TubeModel& B, const std::vector<Mat>& f) const;

private:
    const FieldTable* F_;
    int n_;
    mutable std::map<std::pair<TubeClass, TubeClass>, long> hom_cache_;
};

// Gaussian elimination helpers over a FieldTable (dense, small).
int mat_rank(const FieldTable& F, Mat m);
// basis of the right null space of m (vectors of length cols)
std::vector<std::vector<int>> mat_nullspace(const FieldTable& F, Mat m);
// row space basis in reduced echelon form
Mat mat_rowspace(const FieldTable& F, Mat m);
// enumerate all k-dimensional subspaces of F^n as RREF basis matrices
std::vector<Mat> subspaces(const FieldTable& F, int n, int k);

mpz_class gl_order(long Q, int m);  // |GL_m(F_Q)|

}  // namespace ihall
