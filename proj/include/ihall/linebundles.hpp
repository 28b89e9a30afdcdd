#pragma once

#include "ihall/lattice.hpp"
#include "ihall/tube.hpp"

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace ihall {

// Native sheaf workbench for weight types with t <= 2. Objects are presented
// degreewise over a window of L(p)-degrees; line and torsion pieces are
// presented so that every graded piece equals the space of sheaf sections of
// the corresponding twist (torsion pieces periodically, line pieces by
// monomials), which keeps kernels exact in every degree. Cokernels are exact
// above a saturation bound and are only read there.

// One indecomposable standard piece.
struct Piece {
    enum Kind { Line, Exc, Ord } kind = Line;
    LVec twist;      // Line: O(twist)
    int branch = 0;  // Exc: branch index (1-based)
    int top = 0;     // Exc: top residue
    int len = 0;     // Exc / Ord: length (Ord: length over the residue field)
    PointId pt;      // Ord: the ordinary point
};

// Degree in L(p) for t <= 2, flattened over a window.
struct DegWindow {
    const Ctx* ctx;
    long lo = 0, hi = 0;  // range of the c-coefficient
    int p1 = 1, p2 = 1;

    explicit DegWindow(const Ctx& c, long lo_, long hi_);
    int count() const { return (int)((hi - lo + 1) * p1 * p2); }
    int index(const LVec& d) const;          // -1 if out of window
    LVec degree(int idx) const;
    bool in_window(const LVec& d) const { return d.l >= lo && d.l <= hi; }
};

// Degreewise presentation: dims per degree plus step matrices for x_1, x_2.
// step(i, idx) maps the piece at degree idx to the piece at idx + x_i.
class Pres {
public:
    static Pres standard(const Ctx& c, const std::vector<Piece>& pieces, const DegWindow& w);
    // kernel of a degreewise map f between two presentations on one window
    static Pres kernel(const Pres& A, const Pres& B, const std::vector<Mat>& f);
    // cokernel of the same data (exact only above the saturation bound)
    static Pres cokernel(const Pres& A, const Pres& B, const std::vector<Mat>& f);

    const Ctx& ctx() const { return *ctx_; }
    const DegWindow& window() const { return win_; }
    int dim(int idx) const { return dims_[idx]; }
    // step matrix of multiplication by x_dir (dir = 1,2) out of degree idx;
    // empty target or source gives an empty matrix
    const Mat& step(int dir, int idx) const { return steps_[dir - 1][idx]; }

    // apply x_1^e1 x_2^e2 to a vector at degree idx
    std::vector<int> act(int e1, int e2, int idx, std::vector<int> v) const;

    // degrees with l below this bound carry no trustworthy data (kernels and
    // cokernels of maps whose matrices could not be assembled that low)
    long valid_lo() const { return valid_lo_; }
    void require_valid(long l) const;

    Pres(const Ctx& c, const DegWindow& w) : ctx_(&c), win_(w), valid_lo_(w.lo) {}
    std::vector<int> dims_;
    std::array<std::vector<Mat>, 2> steps_;
    long valid_lo_;

private:
    const Ctx* ctx_;
    DegWindow win_;
};

// lowest l at which generator transports for all pieces of A are available
long hom_assembly_lo(const Ctx& c, const std::vector<Piece>& pieces);

// Section space of Hom(O(a), O(b)): monomial basis of degree b - a.
struct SectionSpace {
    LVec deg;                                    // b - a in normal form
    std::vector<std::pair<int, int>> monomials;  // exponent pairs (e1, e2)
    int dim() const { return (int)monomials.size(); }
};

SectionSpace section_basis(const Ctx& c, const LVec& a, const LVec& b);

// A section written as x_1^c1 x_2^c2 * h(y1, y2) with h of y-degree m.
struct SectionFactorization {
    int c1 = 0, c2 = 0;
    std::vector<int> yform;  // coefficients of h: h = sum yform[j] y1^(m-j) y2^j
};

SectionFactorization factor_section(const Ctx& c, const SectionSpace& sp,
                                    const std::vector<int>& coeffs);

// Torsion data of a coherent sheaf: per-point tube classes.
using TorsionData = std::map<PointId, TubeClass>;

// cokernel of a nonzero section O(a) -> O(b), classified pointwise
TorsionData cokernel_of_section(const Ctx& c, const LVec& a, const LVec& b,
                                const std::vector<int>& coeffs);

// tube rank at a point (p_i at branch i, 1 at ordinary points)
int tube_rank_at(const Ctx& c, const PointId& p);
// the Tube helper for a point (cached per context/point degree)
const Tube& tube_at(const Ctx& c, const PointId& p);

// dim_k of sheaf sections of the standard piece at a given degree
int piece_dim_at(const Ctx& c, const Piece& p, const LVec& d);

// dim_k Hom(O(u), piece)
int hom_line_to_piece(const Ctx& c, const LVec& u, const Piece& p);

// Workbench object bundled with its window.
struct WorkObj {
    std::vector<Piece> pieces;
    Pres pres;
    WorkObj(const Ctx& c, std::vector<Piece> ps, const DegWindow& w)
        : pieces(std::move(ps)), pres(Pres::standard(c, pieces, w)) {}
};

// generator degree and relation of a piece: Hom(piece, B) = {b in B at
// gen_degree : rel * b = 0}
LVec piece_gen_degree(const Ctx& c, const Piece& p);

// Hom(piece, B)-space: basis vectors at the probe degree
std::vector<std::vector<int>> hom_piece_into(const Ctx& c, const Piece& p, const Pres& B);

// full Hom(A, B): per-piece bases; an element is a choice of coefficients
struct HomSpace {
    std::vector<std::vector<std::vector<int>>> piece_basis;  // [piece][basis vector]
    long dim_k() const {
        long d = 0;
        for (auto& pb : piece_basis) d += (long)pb.size();
        return d;
    }
};
HomSpace hom_space(const Ctx& c, const WorkObj& A, const Pres& B);

// degreewise matrices of a Hom element given by one image vector per piece;
// degrees with l below min_l are left as zero matrices (callers must not
// read kernel/cokernel data below that bound)
std::vector<Mat> hom_element_matrices(const Ctx& c, const WorkObj& A, const Pres& B,
                                      const std::vector<std::vector<int>>& images,
                                      long min_l = std::numeric_limits<long>::min());

// Extract and classify the torsion part of a presentation, reading at the
// saturated band starting at base_l; maxlen bounds the torsion length per
// point (window height must cover base_l + maxlen + 2).
TorsionData extract_torsion(const Ctx& c, const Pres& P, long base_l,
                            const std::vector<PointId>& support, int maxlen);

// Solve for the K0 class of a presentation from its dimensions on the
// saturated band at base_l (valid when all Ext^1(O(-d), X) vanish there).
K0Class class_from_dims(const Ctx& c, const Pres& P, long base_l);

// dim Hom(O(u), X) for X = coker(phi: O(w) -> (+) O(v_i)) via the long exact
// sequence; phi given by section coefficient vectors per target line.
int hom_line_to_line_cokernel(const Ctx& c, const LVec& u, const LVec& w,
                              const std::vector<LVec>& targets,
                              const std::vector<std::vector<int>>& phi);

// same for X = coker(phi: (+) O(w_j) -> (+) O(v_i)) with phi[i][j] a section
// coefficient vector in the basis of Hom(O(w_j), O(v_i))
int hom_line_to_bundle_cokernel(const Ctx& c, const LVec& u, const std::vector<LVec>& sources,
                                const std::vector<LVec>& targets,
                                const std::vector<std::vector<std::vector<int>>>& phi);

// Split a rank-2 (or rank-3) kernel presentation into line twists by probing
// section dimensions; `torsion` is its already-classified torsion part and
// `cls` its K0 class. Candidate twists are scanned downward from `maxdeg`.
std::vector<LVec> split_bundle_part(const Ctx& c, const Pres& K, const TorsionData& torsion,
                                    const K0Class& cls, const std::vector<LVec>& candidates);

// number of monic forms: size of the section space, q^dim
long section_count(const Ctx& c, const LVec& a, const LVec& b);

}  // namespace ihall
