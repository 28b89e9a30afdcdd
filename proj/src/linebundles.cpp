#include "ihall/linebundles.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace ihall {

namespace {
int wrap(int j, int n) { return ((j % n) + n) % n; }
}

DegWindow::DegWindow(const Ctx& c, long lo_, long hi_) : ctx(&c), lo(lo_), hi(hi_) {
    if (c.t() != 2) throw std::domain_error("native workbench supports weight types with t = 2");
    p1 = c.weights[0];
    p2 = c.weights[1];
}

int DegWindow::index(const LVec& d) const {
    if (d.l < lo || d.l > hi) return -1;
    return (int)((d.l - lo) * p1 * p2 + d.a[0] * p2 + d.a[1]);
}

LVec DegWindow::degree(int idx) const {
    LVec d;
    d.l = lo + idx / (p1 * p2);
    int r = idx % (p1 * p2);
    d.a = {r / p2, r % p2};
    return d;
}

int piece_dim_at(const Ctx& c, const Piece& p, const LVec& d) {
    switch (p.kind) {
        case Piece::Line: {
            LVec s = p.twist.add(c, d);
            return s.l >= 0 ? (int)s.l + 1 : 0;
        }
        case Piece::Exc: {
            int pi = c.weights[p.branch - 1];
            int r = wrap(d.a[p.branch - 1] + p.top, pi);
            // labels e in [0, len) with e = r mod p_i
            if (r >= p.len) return 0;
            return (p.len - 1 - r) / pi + 1;
        }
        case Piece::Ord:
            return p.len * p.pt.deg;
    }
    return 0;
}

int hom_line_to_piece(const Ctx& c, const LVec& u, const Piece& p) {
    return piece_dim_at(c, p, u.neg(c));
}

LVec piece_gen_degree(const Ctx& c, const Piece& p) {
    switch (p.kind) {
        case Piece::Line:
            return p.twist.neg(c);
        case Piece::Exc:
            return LVec::x_gen(c, p.branch, p.top).neg(c);
        case Piece::Ord:
            return LVec::zero(c);
    }
    return LVec::zero(c);
}

namespace {

// ordinary piece: companion-style matrix of multiplication by z on
// F_q[z]/(pi^len), dimension len*deg over F_q
Mat z_mult_matrix(const Ctx& c, const Piece& p) {
    const FieldTable& F = c.gf->field();
    Poly pm = {1};
    for (int i = 0; i < p.len; ++i) pm = poly_mul(F, pm, p.pt.poly);
    int n = p.len * p.pt.deg;
    Mat Z(n, std::vector<int>(n, 0));
    for (int k = 0; k + 1 < n; ++k) Z[k + 1][k] = 1;  // z * z^k = z^(k+1)
    // z * z^(n-1) = z^n = -(pm[0] + pm[1] z + ... + pm[n-1] z^(n-1))
    for (int r = 0; r < n; ++r) Z[r][n - 1] = F.neg(pm[r]);
    return Z;
}

// basis labels of an Exc piece at a degree: ascending labels e
std::vector<int> exc_labels(const Ctx& c, const Piece& p, const LVec& d) {
    int pi = c.weights[p.branch - 1];
    int r = wrap(d.a[p.branch - 1] + p.top, pi);
    std::vector<int> out;
    for (int e = r; e < p.len; e += pi) out.push_back(e);
    return out;
}

}  // namespace

Pres Pres::standard(const Ctx& c, const std::vector<Piece>& pieces, const DegWindow& w) {
    Pres P(c, w);
    int N = w.count();
    P.dims_.assign(N, 0);
    // per-piece offsets per degree
    std::vector<std::vector<int>> off(N, std::vector<int>(pieces.size() + 1, 0));
    for (int idx = 0; idx < N; ++idx) {
        LVec d = w.degree(idx);
        for (size_t k = 0; k < pieces.size(); ++k)
            off[idx][k + 1] = off[idx][k] + piece_dim_at(c, pieces[k], d);
        P.dims_[idx] = off[idx][pieces.size()];
    }
    const FieldTable& F = c.gf->field();
    for (int dir = 1; dir <= 2; ++dir) {
        P.steps_[dir - 1].assign(N, Mat{});
        for (int idx = 0; idx < N; ++idx) {
            LVec d = w.degree(idx);
            LVec dn = d.add(c, LVec::x_gen(c, dir));
            int tgt = w.index(dn);
            if (tgt < 0) continue;
            Mat m(P.dims_[tgt] > 0 ? P.dims_[tgt] : 0, std::vector<int>(P.dims_[idx], 0));
            if (P.dims_[idx] == 0 || P.dims_[tgt] == 0) {
                P.steps_[dir - 1][idx] = Mat(P.dims_[tgt], std::vector<int>(P.dims_[idx], 0));
                continue;
            }
            for (size_t k = 0; k < pieces.size(); ++k) {
                const Piece& pc = pieces[k];
                int so = off[idx][k], to = off[tgt][k];
                switch (pc.kind) {
                    case Piece::Line: {
                        // monomial basis: (e1, e2) with e1 x1 + e2 x2 = twist + d
                        LVec s = pc.twist.add(c, d);
                        if (s.l < 0) break;
                        LVec sn = pc.twist.add(c, dn);
                        auto col_of = [&](const LVec& sdeg, int e1) {
                            // e1 = a1 + alpha p1, column = alpha
                            return (e1 - sdeg.a[0]) / c.weights[0];
                        };
                        for (long alpha = 0; alpha <= s.l; ++alpha) {
                            int e1 = (int)(s.a[0] + alpha * c.weights[0]);
                            int e2 = (int)(s.a[1] + (s.l - alpha) * c.weights[1]);
                            int ne1 = e1 + (dir == 1 ? 1 : 0);
                            int ne2 = e2 + (dir == 2 ? 1 : 0);
                            // target monomial exists iff exponents match sn
                            if ((ne1 - sn.a[0]) % c.weights[0] != 0) throw std::logic_error("line step");
                            int col = (int)alpha;
                            int row = col_of(sn, ne1);
                            (void)ne2;
                            if (row >= 0 && row <= sn.l) m[to + row][so + col] = 1;
                        }
                        break;
                    }
                    case Piece::Exc: {
                        auto ls = exc_labels(c, pc, d);
                        auto lt = exc_labels(c, pc, dn);
                        if (dir == pc.branch) {
                            // x_i: label e -> e + 1 (dies at len)
                            for (size_t col = 0; col < ls.size(); ++col) {
                                int target_label = ls[col] + 1;
                                for (size_t row = 0; row < lt.size(); ++row)
                                    if (lt[row] == target_label) m[to + (int)row][so + (int)col] = 1;
                            }
                        } else {
                            // the other coordinate acts as the identity on labels
                            for (size_t col = 0; col < ls.size(); ++col)
                                for (size_t row = 0; row < lt.size(); ++row)
                                    if (lt[row] == ls[col]) m[to + (int)row][so + (int)col] = 1;
                        }
                        break;
                    }
                    case Piece::Ord: {
                        int n = pc.len * pc.pt.deg;
                        if (dir == 1) {
                            for (int v = 0; v < n; ++v) m[to + v][so + v] = 1;
                        } else {
                            // identity except at the wrap step a_2 = p_2 - 1
                            if (d.a[1] == c.weights[1] - 1) {
                                Mat Z = z_mult_matrix(c, pc);
                                for (int r = 0; r < n; ++r)
                                    for (int col = 0; col < n; ++col) m[to + r][so + col] = Z[r][col];
                            } else {
                                for (int v = 0; v < n; ++v) m[to + v][so + v] = 1;
                            }
                        }
                        break;
                    }
                }
            }
            (void)F;
            P.steps_[dir - 1][idx] = std::move(m);
        }
    }
    return P;
}

void Pres::require_valid(long l) const {
    if (l < valid_lo_) throw std::logic_error("presentation read below its valid range");
}

long hom_assembly_lo(const Ctx& c, const std::vector<Piece>& pieces) {
    long lo = std::numeric_limits<long>::min() / 4;
    for (const Piece& p : pieces) {
        long need = lo;
        if (p.kind == Piece::Exc) {
            // transport x_i^e x_other^E from the generator degree: E >= 0 needs
            // roughly l >= (top + len)/p + 1
            need = (p.top + p.len) / c.weights[p.branch - 1] + 2;
        } else if (p.kind == Piece::Ord) {
            need = (long)p.len * p.pt.deg + 1;
        }
        lo = std::max(lo, need);
    }
    return lo;
}

std::vector<int> Pres::act(int e1, int e2, int idx, std::vector<int> v) const {
    const FieldTable& F = ctx_->gf->field();
    int cur = idx;
    auto apply = [&](int dir) {
        int nxt = win_.index(win_.degree(cur).add(*ctx_, LVec::x_gen(*ctx_, dir)));
        if (nxt < 0) throw std::logic_error("Pres::act stepped outside the window");
        const Mat& m = steps_[dir - 1][cur];
        std::vector<int> out((size_t)dims_[nxt], 0);
        for (size_t r = 0; r < m.size(); ++r)
            for (size_t cidx = 0; cidx < v.size(); ++cidx)
                if (m[r][cidx] && v[cidx]) out[r] = F.add(out[r], F.mul(m[r][cidx], v[cidx]));
        v = std::move(out);
        cur = nxt;
    };
    for (int i = 0; i < e1; ++i) apply(1);
    for (int i = 0; i < e2; ++i) apply(2);
    return v;
}

Pres Pres::kernel(const Pres& A, const Pres& B, const std::vector<Mat>& f) {
    const Ctx& c = A.ctx();
    const FieldTable& F = c.gf->field();
    const DegWindow& w = A.window();
    Pres K(c, w);
    K.valid_lo_ = std::max(A.valid_lo(), B.valid_lo());
    int N = w.count();
    K.dims_.assign(N, 0);
    // kernel bases per degree (rows = basis vectors in A-coordinates)
    std::vector<Mat> basis(N);
    for (int idx = 0; idx < N; ++idx) {
        if (A.dim(idx) == 0) continue;
        Mat m = f[idx];
        if (m.empty()) {
            // zero map out of this degree
            basis[idx].assign(A.dim(idx), std::vector<int>(A.dim(idx), 0));
            for (int i = 0; i < A.dim(idx); ++i) basis[idx][i][i] = 1;
        } else {
            auto ns = mat_nullspace(F, m);
            basis[idx] = Mat(ns.begin(), ns.end());
        }
        K.dims_[idx] = (int)basis[idx].size();
    }
    // induced steps: express step(image of kernel basis) in kernel basis of target
    for (int dir = 1; dir <= 2; ++dir) {
        K.steps_[dir - 1].assign(N, Mat{});
        for (int idx = 0; idx < N; ++idx) {
            LVec dn = w.degree(idx).add(c, LVec::x_gen(c, dir));
            int tgt = w.index(dn);
            if (tgt < 0) continue;
            Mat m(K.dims_[tgt], std::vector<int>(K.dims_[idx], 0));
            if (K.dims_[idx] && K.dims_[tgt]) {
                const Mat& st = A.step(dir, idx);
                // solve basis[tgt]^T coeff = st * basis[idx][col]^T
                // build augmented system per column
                int dt = A.dim(tgt);
                Mat sys(dt, std::vector<int>(K.dims_[tgt] + K.dims_[idx], 0));
                for (int r = 0; r < dt; ++r)
                    for (int b = 0; b < K.dims_[tgt]; ++b) sys[r][b] = basis[tgt][b][r];
                for (int col = 0; col < K.dims_[idx]; ++col) {
                    std::vector<int> img(dt, 0);
                    for (int r = 0; r < dt; ++r)
                        for (int s = 0; s < A.dim(idx); ++s)
                            if (st[r][s] && basis[idx][col][s])
                                img[r] = F.add(img[r], F.mul(st[r][s], basis[idx][col][s]));
                    for (int r = 0; r < dt; ++r) sys[r][K.dims_[tgt] + col] = img[r];
                }
                // gaussian solve for all columns at once
                Mat g = sys;
                std::vector<int> pivot_col;
                int rr = 0;
                for (int cidx = 0; cidx < K.dims_[tgt] && rr < dt; ++cidx) {
                    int piv = -1;
                    for (int i = rr; i < dt; ++i)
                        if (g[i][cidx]) { piv = i; break; }
                    if (piv < 0) continue;
                    std::swap(g[rr], g[piv]);
                    int inv = F.inv(g[rr][cidx]);
                    for (size_t j = 0; j < g[rr].size(); ++j) g[rr][j] = F.mul(g[rr][j], inv);
                    for (int i = 0; i < dt; ++i) {
                        if (i == rr || !g[i][cidx]) continue;
                        int fa = g[i][cidx];
                        for (size_t j = 0; j < g[rr].size(); ++j)
                            g[i][j] = F.sub(g[i][j], F.mul(fa, g[rr][j]));
                    }
                    pivot_col.push_back(cidx);
                    ++rr;
                }
                for (int col = 0; col < K.dims_[idx]; ++col)
                    for (size_t pr = 0; pr < pivot_col.size(); ++pr)
                        m[pivot_col[pr]][col] = g[pr][K.dims_[tgt] + col];
            }
            K.steps_[dir - 1][idx] = std::move(m);
        }
    }
    return K;
}

Pres Pres::cokernel(const Pres& A, const Pres& B, const std::vector<Mat>& f) {
    const Ctx& c = B.ctx();
    const FieldTable& F = c.gf->field();
    const DegWindow& w = B.window();
    Pres C(c, w);
    C.valid_lo_ = std::max(A.valid_lo(), B.valid_lo());
    int N = w.count();
    C.dims_.assign(N, 0);
    // quotient: choose complement coordinates of im(f) in each degree
    std::vector<std::vector<int>> comp(N);  // complement coordinate indices
    std::vector<Mat> proj(N);               // projection B_d -> C_d (empty = identity)
    std::vector<bool> trivial(N, true);     // f has zero image at this degree
    for (int idx = 0; idx < N; ++idx) {
        int db = B.dim(idx);
        if (db == 0) continue;
        // image rows
        Mat img;
        if (!f[idx].empty() && A.dim(idx) > 0) {
            for (int col = 0; col < A.dim(idx); ++col) {
                bool nz = false;
                for (int r = 0; r < db; ++r)
                    if (f[idx][r][col]) { nz = true; break; }
                if (!nz) continue;
                std::vector<int> v(db);
                for (int r = 0; r < db; ++r) v[r] = f[idx][r][col];
                img.push_back(std::move(v));
            }
        }
        if (img.empty()) {
            C.dims_[idx] = db;
            continue;  // trivial: cokernel piece = B piece
        }
        trivial[idx] = false;
        Mat red = mat_rowspace(F, std::move(img));
        std::vector<int> pivots;
        for (auto& row : red) {
            int lead = -1;
            for (int j2 = 0; j2 < db; ++j2)
                if (row[j2]) { lead = j2; break; }
            pivots.push_back(lead);
        }
        std::vector<bool> is_piv(db, false);
        for (int pv : pivots) is_piv[pv] = true;
        for (int j2 = 0; j2 < db; ++j2)
            if (!is_piv[j2]) comp[idx].push_back(j2);
        C.dims_[idx] = (int)comp[idx].size();
        // projection: reduce a vector by red, then take complement coords
        proj[idx] = Mat(C.dims_[idx], std::vector<int>(db, 0));
        for (int u = 0; u < db; ++u) {
            std::vector<int> v(db, 0);
            v[u] = 1;
            for (size_t r = 0; r < red.size(); ++r) {
                int lead = pivots[r];
                if (v[lead]) {
                    int fa = v[lead];
                    for (int j2 = 0; j2 < db; ++j2) v[j2] = F.sub(v[j2], F.mul(fa, red[r][j2]));
                }
            }
            for (int r = 0; r < C.dims_[idx]; ++r) proj[idx][r][u] = v[comp[idx][r]];
        }
    }
    for (int dir = 1; dir <= 2; ++dir) {
        C.steps_[dir - 1].assign(N, Mat{});
        for (int idx = 0; idx < N; ++idx) {
            LVec dn = w.degree(idx).add(c, LVec::x_gen(c, dir));
            int tgt = w.index(dn);
            if (tgt < 0) continue;
            if (trivial[idx] && trivial[tgt]) {
                C.steps_[dir - 1][idx] = B.step(dir, idx);
                continue;
            }
            Mat m(C.dims_[tgt], std::vector<int>(C.dims_[idx], 0));
            if (C.dims_[idx] && C.dims_[tgt]) {
                const Mat& st = B.step(dir, idx);
                for (int col = 0; col < C.dims_[idx]; ++col) {
                    // lift: unit complement vector in B coordinates
                    int lift = trivial[idx] ? col : comp[idx][col];
                    std::vector<int> img(B.dim(tgt), 0);
                    for (int r = 0; r < B.dim(tgt); ++r) img[r] = st[r][lift];
                    if (trivial[tgt]) {
                        for (int r = 0; r < C.dims_[tgt]; ++r) m[r][col] = img[r];
                    } else {
                        for (int r = 0; r < C.dims_[tgt]; ++r) {
                            int acc = 0;
                            for (int s = 0; s < B.dim(tgt); ++s)
                                if (proj[tgt][r][s] && img[s])
                                    acc = F.add(acc, F.mul(proj[tgt][r][s], img[s]));
                            m[r][col] = acc;
                        }
                    }
                }
            }
            C.steps_[dir - 1][idx] = std::move(m);
        }
    }
    return C;
}

SectionSpace section_basis(const Ctx& c, const LVec& a, const LVec& b) {
    SectionSpace sp;
    sp.deg = b.sub(c, a);
    if (sp.deg.l >= 0) {
        for (long alpha = 0; alpha <= sp.deg.l; ++alpha) {
            int e1 = (int)(sp.deg.a[0] + alpha * c.weights[0]);
            int e2 = (int)(sp.deg.a[1] + (sp.deg.l - alpha) * c.weights[1]);
            sp.monomials.push_back({e1, e2});
        }
    }
    return sp;
}

long section_count(const Ctx& c, const LVec& a, const LVec& b) {
    long d = (long)section_basis(c, a, b).dim();
    long n = 1;
    for (long i = 0; i < d; ++i) n *= c.q;
    return n;
}

SectionFactorization factor_section(const Ctx& c, const SectionSpace& sp,
                                    const std::vector<int>& coeffs) {
    SectionFactorization out;
    if (sp.deg.l < 0) throw std::invalid_argument("factor_section: empty space");
    out.c1 = sp.deg.a[0];
    out.c2 = sp.deg.a[1];
    out.yform.assign(sp.deg.l + 1, 0);
    bool nz = false;
    for (int i = 0; i < sp.dim(); ++i) {
        // monomial with e1 = a1 + alpha p1 contributes to y1^alpha y2^(l-alpha)
        long alpha = (sp.monomials[i].first - sp.deg.a[0]) / c.weights[0];
        // yform[j] multiplies y1^(m-j) y2^j with m = deg.l: j = l - alpha
        out.yform[sp.deg.l - alpha] = coeffs[i];
        if (coeffs[i]) nz = true;
    }
    if (!nz) throw std::invalid_argument("factor_section: zero section");
    return out;
}

int tube_rank_at(const Ctx& c, const PointId& p) {
    return p.exceptional ? c.weights[p.branch - 1] : 1;
}

const Tube& tube_at(const Ctx& c, const PointId& p) {
    struct Entry {
        std::shared_ptr<GroundField> keepalive;
        Tube tube;
    };
    using Key = std::tuple<long, std::vector<int>, bool, int, Poly>;
    static std::map<Key, Entry> cache;
    Key key{c.q, c.weights, p.exceptional, p.branch, p.poly};
    auto it = cache.find(key);
    if (it == cache.end()) {
        const FieldTable& F = p.exceptional ? c.gf->field() : c.gf->extension_field(p.deg);
        it = cache.emplace(key, Entry{c.gf, Tube(F, tube_rank_at(c, p))}).first;
    }
    return it->second.tube;
}

TorsionData cokernel_of_section(const Ctx& c, const LVec& a, const LVec& b,
                                const std::vector<int>& coeffs) {
    SectionSpace sp = section_basis(c, a, b);
    SectionFactorization f = factor_section(c, sp, coeffs);
    TorsionData out;
    // exceptional valuations: v_i = c_i + p_i * (mult of y_i in the form);
    // y1 vanishes at branch 1 (infinity), y2 at branch 2 (zero)
    auto fac = c.gf->factor_binary_form(f.yform);
    int v1 = f.c1, v2 = f.c2;
    for (auto& [pt, mult] : fac) {
        if (pt.exceptional && pt.branch == 1) v1 += mult * c.weights[0];
        else if (pt.exceptional && pt.branch == 2) v2 += mult * c.weights[1];
        else {
            PointId p = pt;
            out[p] = TubeClass::uniserial(0, mult, 1);
        }
    }
    // uniserial cokernel at branch i with top = b's coordinate
    if (v1 > 0) {
        PointId p = c.gf->point_at_infinity();
        out[p] = TubeClass::uniserial(b.a[0], v1, c.weights[0]);
    }
    if (v2 > 0) {
        PointId p = c.gf->point_of_linear(0);
        out[p] = TubeClass::uniserial(b.a[1], v2, c.weights[1]);
    }
    return out;
}

std::vector<std::vector<int>> hom_piece_into(const Ctx& c, const Piece& p, const Pres& B) {
    const FieldTable& F = c.gf->field();
    const DegWindow& w = B.window();
    LVec delta = piece_gen_degree(c, p);
    int idx = w.index(delta);
    if (idx < 0) throw std::logic_error("hom probe degree outside window");
    int db = B.dim(idx);
    if (db == 0) return {};
    switch (p.kind) {
        case Piece::Line: {
            std::vector<std::vector<int>> out;
            for (int i = 0; i < db; ++i) {
                std::vector<int> v(db, 0);
                v[i] = 1;
                out.push_back(v);
            }
            return out;
        }
        case Piece::Exc: {
            // kernel of x_i^len acting from the probe degree
            Mat rows;
            std::vector<std::vector<int>> units;
            for (int i = 0; i < db; ++i) {
                std::vector<int> v(db, 0);
                v[i] = 1;
                std::vector<int> img = p.branch == 1 ? B.act(p.len, 0, idx, v) : B.act(0, p.len, idx, v);
                rows.push_back(img);
            }
            // rows[i] = image of unit i; kernel of the transpose-applied map
            Mat m;
            if (!rows.empty() && !rows[0].empty()) {
                m.assign(rows[0].size(), std::vector<int>(db, 0));
                for (int i = 0; i < db; ++i)
                    for (size_t r = 0; r < rows[i].size(); ++r) m[r][i] = rows[i][r];
            }
            if (m.empty()) {
                std::vector<std::vector<int>> out;
                for (int i = 0; i < db; ++i) {
                    std::vector<int> v(db, 0);
                    v[i] = 1;
                    out.push_back(v);
                }
                return out;
            }
            return mat_nullspace(F, m);
        }
        case Piece::Ord: {
            // kernel of pi^len: apply the homogeneous form (pi_form)^len
            // pi_form has y-degree deg; total degree len*deg*c
            // action: sum over monomials of the form
            std::vector<int> formpow;
            {
                // expand pi(y1,y2)^len in y-coefficients: pi monic irred in z
                // as y-form: coeffs yf[j] of y1^(deg-j) y2^j = poly[j]
                std::vector<int> yf(p.pt.poly.begin(), p.pt.poly.end());
                std::vector<int> acc = {1};
                for (int e = 0; e < p.len; ++e) {
                    std::vector<int> nxt(acc.size() + yf.size() - 1, 0);
                    for (size_t i = 0; i < acc.size(); ++i)
                        for (size_t j = 0; j < yf.size(); ++j)
                            nxt[i + j] = F.add(nxt[i + j], F.mul(acc[i], yf[j]));
                    acc = std::move(nxt);
                }
                formpow = std::move(acc);
            }
            int D = (int)formpow.size() - 1;  // y-degree of pi^len
            Mat m;
            for (int i = 0; i < db; ++i) {
                std::vector<int> v(db, 0);
                v[i] = 1;
                std::vector<int> img;
                for (int j = 0; j <= D; ++j) {
                    if (!formpow[j]) continue;
                    // y1^(D-j) y2^j = x1^((D-j)p1) x2^(j p2)
                    std::vector<int> term = B.act((D - j) * c.weights[0], j * c.weights[1], idx, v);
                    for (auto& t : term) t = F.mul(t, formpow[j]);
                    if (img.empty()) img.assign(term.size(), 0);
                    for (size_t r = 0; r < term.size(); ++r) img[r] = F.add(img[r], term[r]);
                }
                if (img.empty()) img.assign(1, 0);
                m.push_back(img);
            }
            Mat sys(m[0].size(), std::vector<int>(db, 0));
            for (int i = 0; i < db; ++i)
                for (size_t r = 0; r < m[i].size(); ++r) sys[r][i] = m[i][r];
            return mat_nullspace(F, sys);
        }
    }
    return {};
}

HomSpace hom_space(const Ctx& c, const WorkObj& A, const Pres& B) {
    HomSpace hs;
    for (const Piece& p : A.pieces) hs.piece_basis.push_back(hom_piece_into(c, p, B));
    return hs;
}

std::vector<Mat> hom_element_matrices(const Ctx& c, const WorkObj& A, const Pres& B,
                                      const std::vector<std::vector<int>>& images, long min_l) {
    const DegWindow& w = A.pres.window();
    long vlo = std::max(hom_assembly_lo(c, A.pieces), min_l);
    int N = w.count();
    std::vector<Mat> f(N);
    for (int idx = 0; idx < N; ++idx) {
        int da = A.pres.dim(idx), db = B.dim(idx);
        f[idx].assign(db, std::vector<int>(da, 0));
        if (da == 0 || db == 0) continue;
        LVec d = w.degree(idx);
        if (d.l < vlo) continue;  // below the assembly range; callers must not read here
        int colbase = 0;
        for (size_t k = 0; k < A.pieces.size(); ++k) {
            const Piece& pc = A.pieces[k];
            int pd = piece_dim_at(c, pc, d);
            if (pd == 0) { continue; }
            const std::vector<int>& b = images[k];
            LVec delta = piece_gen_degree(c, pc);
            int pidx = w.index(delta);
            if (pidx < 0) throw std::logic_error("hom element: probe outside window");
            switch (pc.kind) {
                case Piece::Line: {
                    LVec s = pc.twist.add(c, d);
                    for (long alpha = 0; alpha <= s.l; ++alpha) {
                        int e1 = (int)(s.a[0] + alpha * c.weights[0]);
                        int e2 = (int)(s.a[1] + (s.l - alpha) * c.weights[1]);
                        std::vector<int> img = B.act(e1, e2, pidx, b);
                        for (size_t r = 0; r < img.size(); ++r) f[idx][r][colbase + alpha] = img[r];
                    }
                    break;
                }
                case Piece::Exc: {
                    auto ls = exc_labels(c, pc, d);
                    // element with label e = x_i^e x_other^E gen
                    for (size_t col = 0; col < ls.size(); ++col) {
                        int e = ls[col];
                        LVec v = d.sub(c, delta).sub(c, LVec::x_gen(c, pc.branch, e));
                        // v should be E * x_other
                        int other = pc.branch == 1 ? 2 : 1;
                        if (v.a[pc.branch - 1] != 0) throw std::logic_error("exc label mismatch");
                        long E = v.l * c.weights[other - 1] + v.a[other - 1];
                        if (E < 0) throw std::logic_error("exc transport below window");
                        std::vector<int> img = pc.branch == 1 ? B.act(e, (int)E, pidx, b)
                                                              : B.act((int)E, e, pidx, b);
                        for (size_t r = 0; r < img.size(); ++r) f[idx][r][colbase + col] = img[r];
                    }
                    break;
                }
                case Piece::Ord: {
                    // basis z^k at degree d: path with beta = k wraps
                    LVec v = d;  // delta = 0
                    long l = v.l;
                    if (l < 0) throw std::logic_error("ord transport below window");
                    int n = pc.len * pc.pt.deg;
                    // z^k 1 at degree d = x1^(a1 + (l-k) p1) x2^(a2 + k p2) gen, for k <= l;
                    // for k > l use z-multiplication matrix on the k=0 image
                    Mat Z = z_mult_matrix(c, pc);
                    (void)Z;
                    for (int k = 0; k < n; ++k) {
                        long beta = k;
                        if (beta > l) throw std::logic_error("ord basis needs larger window");
                        int e1 = (int)(v.a[0] + (l - beta) * c.weights[0]);
                        int e2 = (int)(v.a[1] + beta * c.weights[1]);
                        std::vector<int> img = B.act(e1, e2, pidx, b);
                        for (size_t r = 0; r < img.size(); ++r) f[idx][r][colbase + k] = img[r];
                    }
                    break;
                }
            }
            colbase += pd;
        }
    }
    return f;
}

TorsionData extract_torsion(const Ctx& c, const Pres& P, long base_l,
                            const std::vector<PointId>& support, int maxlen) {
    const FieldTable& F = c.gf->field();
    const DegWindow& w = P.window();
    TorsionData out;
    P.require_valid(base_l);
    for (const PointId& pt : support) {
        int n = tube_rank_at(c, pt);
        // base degree: l = base_l, offsets a = 0
        LVec d0 = LVec::c_mult(c, base_l);
        // enough steps to kill every torsion part within the length bound
        int steps = maxlen + 1;
        // collect kernel subspaces at degrees d0 + r x_br (exceptional) or d0 (ordinary)
        if (pt.exceptional) {
            int br = pt.branch;
            int other = br == 1 ? 2 : 1;
            // vertex spaces V_r at degrees d0 + r * x_br, r = 0..n-1, then wrap by y_other^{-1}
            std::vector<Mat> Vbasis(n);
            std::vector<int> Vidx(n);
            for (int r = 0; r < n; ++r) {
                LVec dr = d0.add(c, LVec::x_gen(c, br, r));
                int idx = w.index(dr);
                if (idx < 0) throw std::logic_error("extract_torsion: window too small");
                Vidx[r] = idx;
                int db = P.dim(idx);
                Mat rows;
                for (int i = 0; i < db; ++i) {
                    std::vector<int> v(db, 0);
                    v[i] = 1;
                    std::vector<int> img =
                        br == 1 ? P.act(steps, 0, idx, v) : P.act(0, steps, idx, v);
                    rows.push_back(img);
                }
                Mat sys;
                if (!rows.empty() && !rows[0].empty()) {
                    sys.assign(rows[0].size(), std::vector<int>(db, 0));
                    for (int i = 0; i < db; ++i)
                        for (size_t rr = 0; rr < rows[i].size(); ++rr) sys[rr][i] = rows[i][rr];
                    Vbasis[r] = Mat{};
                    for (auto& v : mat_nullspace(F, sys)) Vbasis[r].push_back(v);
                } else {
                    for (int i = 0; i < db; ++i) {
                        std::vector<int> v(db, 0);
                        v[i] = 1;
                        Vbasis[r].push_back(v);
                    }
                }
            }
            // build tube model: vertex(V_r) = -(d0 + r x_br)_br - offset; see note
            // vertex of elements at degree d is (-d_br) mod n
            TubeModel tm;
            tm.n = n;
            tm.dim.assign(n, 0);
            std::vector<int> vx(n);
            for (int r = 0; r < n; ++r) {
                LVec dr = d0.add(c, LVec::x_gen(c, br, r));
                vx[r] = wrap(-dr.a[br - 1], n);
                tm.dim[vx[r]] = (int)Vbasis[r].size();
            }
            tm.arrow.assign(n, Mat{});
            for (int r = 0; r < n; ++r) {
                int src_v = vx[r];
                int tgt_r = (r + 1) % n;
                int tgt_v = vx[tgt_r];
                // map: x_br action from V_r; for r = n-1 compose with y_other^{-1}
                Mat m((size_t)tm.dim[tgt_v], std::vector<int>(tm.dim[src_v], 0));
                // x action into degree d0 + (r+1) x_br
                LVec dto = d0.add(c, LVec::x_gen(c, br, r + 1));
                for (int col = 0; col < tm.dim[src_v]; ++col) {
                    std::vector<int> img = br == 1 ? P.act(1, 0, Vidx[r], Vbasis[r][col])
                                                   : P.act(0, 1, Vidx[r], Vbasis[r][col]);
                    if (r + 1 < n) {
                        // express in Vbasis[r+1]
                        auto coords = [&](const std::vector<int>& vec) {
                            // solve basis^T x = vec
                            int db = (int)vec.size();
                            Mat sys(db, std::vector<int>(tm.dim[tgt_v] + 1, 0));
                            for (int rr = 0; rr < db; ++rr) {
                                for (int b = 0; b < tm.dim[tgt_v]; ++b) sys[rr][b] = Vbasis[tgt_r][b][rr];
                                sys[rr][tm.dim[tgt_v]] = vec[rr];
                            }
                            // gauss
                            std::vector<int> sol(tm.dim[tgt_v], 0);
                            int rr2 = 0;
                            std::vector<int> pivcols;
                            for (int cc = 0; cc < tm.dim[tgt_v] && rr2 < db; ++cc) {
                                int piv = -1;
                                for (int i = rr2; i < db; ++i)
                                    if (sys[i][cc]) { piv = i; break; }
                                if (piv < 0) continue;
                                std::swap(sys[rr2], sys[piv]);
                                int inv = F.inv(sys[rr2][cc]);
                                for (auto& x : sys[rr2]) x = F.mul(x, inv);
                                for (int i = 0; i < db; ++i) {
                                    if (i == rr2 || !sys[i][cc]) continue;
                                    int fa = sys[i][cc];
                                    for (size_t j = 0; j < sys[i].size(); ++j)
                                        sys[i][j] = F.sub(sys[i][j], F.mul(fa, sys[rr2][j]));
                                }
                                pivcols.push_back(cc);
                                ++rr2;
                            }
                            for (size_t pr = 0; pr < pivcols.size(); ++pr)
                                sol[pivcols[pr]] = sys[pr][tm.dim[tgt_v]];
                            return sol;
                        };
                        auto sol = coords(img);
                        for (int rr = 0; rr < tm.dim[tgt_v]; ++rr) m[rr][col] = sol[rr];
                    } else {
                        // wrap: dto = d0 + c; identify with V_0 via y_other^{-1}
                        // first express img in the Vbasis[0]-pushed-forward frame:
                        // y_other maps V_0 (at d0) isomorphically onto torsion at d0 + c
                        // so solve y_other(w) = img for w in V_0
                        int idx0 = Vidx[0];
                        Mat sys;
                        int db_to = (int)img.size();
                        sys.assign(db_to, std::vector<int>(tm.dim[tgt_v] + 1, 0));
                        for (int b = 0; b < tm.dim[tgt_v]; ++b) {
                            std::vector<int> push =
                                other == 1 ? P.act(c.weights[0], 0, idx0, Vbasis[0][b])
                                           : P.act(0, c.weights[1], idx0, Vbasis[0][b]);
                            for (int rr = 0; rr < db_to; ++rr) sys[rr][b] = push[rr];
                        }
                        for (int rr = 0; rr < db_to; ++rr) sys[rr][tm.dim[tgt_v]] = img[rr];
                        std::vector<int> sol(tm.dim[tgt_v], 0);
                        int rr2 = 0;
                        std::vector<int> pivcols;
                        for (int cc = 0; cc < tm.dim[tgt_v] && rr2 < db_to; ++cc) {
                            int piv = -1;
                            for (int i = rr2; i < db_to; ++i)
                                if (sys[i][cc]) { piv = i; break; }
                            if (piv < 0) continue;
                            std::swap(sys[rr2], sys[piv]);
                            int inv = F.inv(sys[rr2][cc]);
                            for (auto& x : sys[rr2]) x = F.mul(x, inv);
                            for (int i = 0; i < db_to; ++i) {
                                if (i == rr2 || !sys[i][cc]) continue;
                                int fa = sys[i][cc];
                                for (size_t j = 0; j < sys[i].size(); ++j)
                                    sys[i][j] = F.sub(sys[i][j], F.mul(fa, sys[rr2][j]));
                            }
                            pivcols.push_back(cc);
                            ++rr2;
                        }
                        for (size_t pr = 0; pr < pivcols.size(); ++pr)
                            sol[pivcols[pr]] = sys[pr][tm.dim[tgt_v]];
                        for (int rr = 0; rr < tm.dim[tgt_v]; ++rr) m[rr][col] = sol[rr];
                    }
                }
                tm.arrow[src_v] = Mat{};
                // arrow out of vertex src_v goes to src_v - 1 = vx[r+1]
                tm.arrow[src_v] = std::move(m);
            }
            Tube Texc(c.gf->field(), n);
            TubeClass cls = Texc.classify(tm);
            if (cls.total_length() > 0) out[pt] = cls;
        } else {
            // ordinary point: partition from pi^k kernel dims over F_q
            int d = pt.deg;
            LVec dd = d0;
            int idx = w.index(dd);
            if (idx < 0) throw std::logic_error("extract_torsion: window too small");
            // pi action: y-form of the monic irreducible
            std::vector<int> yf(pt.poly.begin(), pt.poly.end());
            auto apply_pi = [&](int at, const std::vector<int>& v) {
                int D = (int)yf.size() - 1;
                std::vector<int> img;
                for (int j = 0; j <= D; ++j) {
                    if (!yf[j]) continue;
                    std::vector<int> term = P.act((D - j) * c.weights[0], j * c.weights[1], at, v);
                    for (auto& t : term) t = F.mul(t, yf[j]);
                    if (img.empty()) img.assign(term.size(), 0);
                    for (size_t r = 0; r < term.size(); ++r) img[r] = F.add(img[r], term[r]);
                }
                return img;
            };
            std::vector<long> kerdim(steps + 1, 0);
            int db = P.dim(idx);
            for (int k = 1; k <= steps; ++k) {
                Mat rows;
                for (int i = 0; i < db; ++i) {
                    std::vector<int> v(db, 0);
                    v[i] = 1;
                    int at = idx;
                    for (int e = 0; e < k; ++e) {
                        v = apply_pi(at, v);
                        LVec cur = w.degree(at).add(c, LVec::c_mult(c, (long)d));
                        at = w.index(cur);
                        if (at < 0 && e + 1 < k) throw std::logic_error("window too small for pi powers");
                    }
                    rows.push_back(v);
                }
                Mat sys;
                if (!rows.empty() && !rows[0].empty()) {
                    sys.assign(rows[0].size(), std::vector<int>(db, 0));
                    for (int i = 0; i < db; ++i)
                        for (size_t rr = 0; rr < rows[i].size(); ++rr) sys[rr][i] = rows[i][rr];
                    kerdim[k] = db - mat_rank(F, sys);
                } else {
                    kerdim[k] = db;
                }
                if (k > 1 && kerdim[k] == kerdim[k - 1]) {
                    for (int k2 = k + 1; k2 <= steps; ++k2) kerdim[k2] = kerdim[k];
                    break;
                }
            }
            // parts >= k count: (kerdim[k] - kerdim[k-1]) / d
            TubeClass cls;
            for (int k = 1; k <= steps; ++k) {
                long cnt_k = (kerdim[k] - kerdim[k - 1]);
                if (cnt_k % d != 0) throw std::logic_error("ordinary torsion extraction mismatch");
            }
            std::vector<long> atleast(steps + 2, 0);
            for (int k = 1; k <= steps; ++k) atleast[k] = (kerdim[k] - kerdim[k - 1]) / d;
            for (int k = 1; k <= steps; ++k) {
                long exact = atleast[k] - (k + 1 <= steps ? atleast[k + 1] : 0);
                for (long e = 0; e < exact; ++e) cls.add_part(0, k, 1);
            }
            if (cls.total_length() > 0) out[pt] = cls;
        }
    }
    return out;
}

K0Class class_from_dims(const Ctx& c, const Pres& P, long base_l) {
    // sample degrees d: dim Gamma(X)(d) = <O(-d), X> on the saturated band.
    // basis of functionals: d = d0 + shifts covering O, delta, alpha_ij
    P.require_valid(base_l);
    const DegWindow& w = P.window();
    std::vector<LVec> samples;
    LVec d0 = LVec::c_mult(c, base_l);
    samples.push_back(d0);
    samples.push_back(d0.add(c, LVec::c_mult(c, 1)));
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k < c.weights[i - 1]; ++k) samples.push_back(d0.add(c, LVec::x_gen(c, i, k)));
    // unknowns: coordinates of X in the basis O, delta, S_ij (j < p_i)
    int nunk = 2;
    for (int i = 0; i < 2; ++i) nunk += std::max(0, c.weights[i] - 1);
    std::vector<std::vector<mpq_class>> sys;
    for (const LVec& d : samples) {
        int idx = w.index(d);
        if (idx < 0) throw std::logic_error("class_from_dims: sample outside window");
        std::vector<mpq_class> row;
        K0Class l = K0Class::line(c, d.neg(c));
        // functional of each basis class
        row.push_back(euler_form(c, l, K0Class::structure_sheaf(c)));
        row.push_back(euler_form(c, l, K0Class::delta(c)));
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j < c.weights[i - 1]; ++j)
                row.push_back(euler_form(c, l, K0Class::simple(c, i, j)));
        row.push_back(P.dim(idx));
        sys.push_back(std::move(row));
    }
    // least-structure exact solve (the system must be consistent and determined)
    int rows = (int)sys.size();
    std::vector<int> pivot(nunk, -1);
    int r = 0;
    for (int col = 0; col < nunk && r < rows; ++col) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (sys[i][col] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(sys[r], sys[piv]);
        mpq_class inv = 1 / sys[r][col];
        for (auto& x : sys[r]) x *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || sys[i][col] == 0) continue;
            mpq_class f = sys[i][col];
            for (int j = 0; j <= nunk; ++j) sys[i][j] -= f * sys[r][j];
        }
        pivot[col] = r;
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (sys[i][nunk] != 0) throw std::logic_error("class_from_dims: inconsistent dims");
    std::vector<long> sol(nunk, 0);
    for (int col = 0; col < nunk; ++col) {
        if (pivot[col] < 0) throw std::logic_error("class_from_dims: underdetermined");
        mpq_class v = sys[pivot[col]][nunk];
        if (v.get_den() != 1) throw std::logic_error("class_from_dims: non-integral");
        sol[col] = (long)v.get_num().get_si();
    }
    // assemble K0Class from (O, delta, S_ij) coordinates
    K0Class out = K0Class::structure_sheaf(c).scaled(sol[0]) + K0Class::delta(c).scaled(sol[1]);
    int at = 2;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j < c.weights[i - 1]; ++j) out = out + K0Class::simple(c, i, j).scaled(sol[at++]);
    return out;
}

int hom_line_to_line_cokernel(const Ctx& c, const LVec& u, const LVec& w,
                              const std::vector<LVec>& targets,
                              const std::vector<std::vector<int>>& phi) {
    const FieldTable& F = c.gf->field();
    // Gamma part: dim coker( S(w - u) --phi--> (+) S(v_i - u) )
    long gamma = 0;
    {
        SectionSpace sw = section_basis(c, u, w);
        long tdim = 0;
        std::vector<SectionSpace> st;
        for (auto& v : targets) {
            st.push_back(section_basis(c, u, v));
            tdim += st.back().dim();
        }
        if (sw.dim() == 0) {
            gamma = tdim;
        } else {
            // matrix of multiplication by phi_i
            Mat m((size_t)tdim, std::vector<int>(sw.dim(), 0));
            long rowbase = 0;
            for (size_t i = 0; i < targets.size(); ++i) {
                SectionSpace sv = section_basis(c, w, targets[i]);
                // phi[i] in basis sv; product with each monomial of sw
                for (int cidx = 0; cidx < sw.dim(); ++cidx) {
                    auto [e1, e2] = sw.monomials[cidx];
                    for (int j = 0; j < sv.dim(); ++j) {
                        if (!phi[i][j]) continue;
                        int f1 = sv.monomials[j].first + e1;
                        int f2 = sv.monomials[j].second + e2;
                        // locate (f1, f2) in st[i]
                        for (int r = 0; r < st[i].dim(); ++r)
                            if (st[i].monomials[r] == std::make_pair(f1, f2)) {
                                m[rowbase + r][cidx] = F.add(m[rowbase + r][cidx], phi[i][j]);
                                break;
                            }
                    }
                }
                rowbase += st[i].dim();
            }
            gamma = tdim - mat_rank(F, m);
        }
    }
    // H^1 kernel part: dim ker( H1(O(w-u)) -> (+) H1(O(v_i-u)) )
    //   = dim H1(O(w-u)) - rank( (+) S(omega-(v_i-u)) -> S(omega-(w-u)) )
    // with omega = -x1 - x2 and maps dual to multiplication by phi_i
    long h1;
    {
        LVec omega = LVec::x_gen(c, 1).neg(c).sub(c, LVec::x_gen(c, 2));
        LVec zw = omega.sub(c, w.sub(c, u));  // omega - (w - u)
        SectionSpace sw1 = section_basis(c, LVec::zero(c), zw);
        long h1w = sw1.dim();
        if (h1w == 0) {
            h1 = 0;
        } else {
            Mat m((size_t)h1w, std::vector<int>(0));
            std::vector<std::vector<int>> cols;
            for (size_t i = 0; i < targets.size(); ++i) {
                LVec zv = omega.sub(c, targets[i].sub(c, u));
                SectionSpace svi = section_basis(c, LVec::zero(c), zv);
                SectionSpace sphi = section_basis(c, w, targets[i]);
                for (int j = 0; j < svi.dim(); ++j) {
                    std::vector<int> col(h1w, 0);
                    // multiply monomial j by phi_i, land in sw1
                    for (int t2 = 0; t2 < sphi.dim(); ++t2) {
                        if (!phi[i][t2]) continue;
                        int f1 = svi.monomials[j].first + sphi.monomials[t2].first;
                        int f2 = svi.monomials[j].second + sphi.monomials[t2].second;
                        for (int r = 0; r < sw1.dim(); ++r)
                            if (sw1.monomials[r] == std::make_pair(f1, f2)) {
                                col[r] = F.add(col[r], phi[i][t2]);
                                break;
                            }
                    }
                    cols.push_back(std::move(col));
                }
            }
            Mat mm(h1w, std::vector<int>(cols.size(), 0));
            for (size_t cidx = 0; cidx < cols.size(); ++cidx)
                for (long r = 0; r < h1w; ++r) mm[r][cidx] = cols[cidx][r];
            h1 = h1w - (cols.empty() ? 0 : mat_rank(F, mm));
        }
    }
    return (int)(gamma + h1);
}

int hom_line_to_bundle_cokernel(const Ctx& c, const LVec& u, const std::vector<LVec>& sources,
                                const std::vector<LVec>& targets,
                                const std::vector<std::vector<std::vector<int>>>& phi) {
    const FieldTable& F = c.gf->field();
    // Gamma part: dim coker( (+)_j S(w_j - u) --phi--> (+)_i S(v_i - u) )
    long gamma = 0;
    {
        std::vector<SectionSpace> sw, st;
        long sdim = 0, tdim = 0;
        for (auto& w : sources) {
            sw.push_back(section_basis(c, u, w));
            sdim += sw.back().dim();
        }
        for (auto& v : targets) {
            st.push_back(section_basis(c, u, v));
            tdim += st.back().dim();
        }
        if (sdim == 0) {
            gamma = tdim;
        } else {
            Mat m((size_t)tdim, std::vector<int>(sdim, 0));
            long colbase = 0;
            for (size_t j = 0; j < sources.size(); ++j) {
                long rowbase = 0;
                for (size_t i = 0; i < targets.size(); ++i) {
                    SectionSpace sv = section_basis(c, sources[j], targets[i]);
                    for (int cidx = 0; cidx < sw[j].dim(); ++cidx) {
                        auto [e1, e2] = sw[j].monomials[cidx];
                        for (int k = 0; k < sv.dim(); ++k) {
                            if (!phi[i][j][k]) continue;
                            int f1 = sv.monomials[k].first + e1;
                            int f2 = sv.monomials[k].second + e2;
                            for (int r = 0; r < st[i].dim(); ++r)
                                if (st[i].monomials[r] == std::make_pair(f1, f2))
                                    m[rowbase + r][colbase + cidx] =
                                        F.add(m[rowbase + r][colbase + cidx], phi[i][j][k]);
                        }
                    }
                    rowbase += st[i].dim();
                }
                colbase += sw[j].dim();
            }
            gamma = tdim - mat_rank(F, m);
        }
    }
    // H^1 kernel: dim (+)_j H1(O(w_j - u)) - rank of the dual multiplication
    long h1;
    {
        LVec omega = LVec::x_gen(c, 1).neg(c).sub(c, LVec::x_gen(c, 2));
        std::vector<SectionSpace> h1w;
        long h1dim = 0;
        for (auto& w : sources) {
            h1w.push_back(section_basis(c, LVec::zero(c), omega.sub(c, w.sub(c, u))));
            h1dim += h1w.back().dim();
        }
        if (h1dim == 0) {
            h1 = 0;
        } else {
            std::vector<std::vector<int>> cols;
            for (size_t i = 0; i < targets.size(); ++i) {
                SectionSpace svi =
                    section_basis(c, LVec::zero(c), omega.sub(c, targets[i].sub(c, u)));
                for (int jmono = 0; jmono < svi.dim(); ++jmono) {
                    std::vector<int> col(h1dim, 0);
                    long rowbase = 0;
                    for (size_t j = 0; j < sources.size(); ++j) {
                        SectionSpace sphi = section_basis(c, sources[j], targets[i]);
                        for (int t2 = 0; t2 < sphi.dim(); ++t2) {
                            if (!phi[i][j][t2]) continue;
                            int f1 = svi.monomials[jmono].first + sphi.monomials[t2].first;
                            int f2 = svi.monomials[jmono].second + sphi.monomials[t2].second;
                            for (int r = 0; r < h1w[j].dim(); ++r)
                                if (h1w[j].monomials[r] == std::make_pair(f1, f2))
                                    col[rowbase + r] = F.add(col[rowbase + r], phi[i][j][t2]);
                        }
                        rowbase += h1w[j].dim();
                    }
                    cols.push_back(std::move(col));
                }
            }
            Mat mm((size_t)h1dim, std::vector<int>(cols.size(), 0));
            for (size_t cidx = 0; cidx < cols.size(); ++cidx)
                for (long r = 0; r < h1dim; ++r) mm[r][cidx] = cols[cidx][r];
            h1 = h1dim - (cols.empty() ? 0 : mat_rank(F, mm));
        }
    }
    return (int)(gamma + h1);
}

std::vector<LVec> split_bundle_part(const Ctx& c, const Pres& K, const TorsionData& torsion,
                                    const K0Class& cls, const std::vector<LVec>& candidates) {
    // h(u) = dim Hom(O(u), K) - dim Hom(O(u), torsion part)
    const DegWindow& w = K.window();
    K0Class bcls = cls;
    for (auto& [pt, tc] : torsion) {
        // subtract the torsion class
        if (pt.exceptional) {
            for (auto& [top, len] : tc.parts)
                bcls = bcls - K0Class::uniserial(c, pt.branch, top, len);
        } else {
            bcls = bcls - K0Class::delta(c).scaled((long)tc.total_length() * pt.deg);
        }
    }
    long r = bcls.rank();
    std::vector<LVec> out;
    K0Class rem = bcls;
    if (r == 0) return out;
    // scan candidates in descending degree
    std::vector<LVec> cand = candidates;
    std::sort(cand.begin(), cand.end(), [&](const LVec& a, const LVec& b) {
        long da = a.degree(c), db = b.degree(c);
        if (da != db) return da > db;
        return b < a;
    });
    auto h = [&](const LVec& u) {
        LVec mu = u.neg(c);
        K.require_valid(mu.l);
        int idx = w.index(mu);
        if (idx < 0) throw std::logic_error("split probe outside window");
        int total = K.dim(idx);
        int tor = 0;
        for (auto& [pt, tc] : torsion) {
            if (pt.exceptional) {
                for (auto& [top, len] : tc.parts) {
                    Piece p;
                    p.kind = Piece::Exc;
                    p.branch = pt.branch;
                    p.top = top;
                    p.len = len;
                    tor += piece_dim_at(c, p, mu);
                }
            } else {
                tor += tc.total_length() * pt.deg;
            }
        }
        return total - tor;
    };
    // expected section count of the already-peeled lines
    auto peeled_h = [&](const LVec& u) {
        int acc = 0;
        for (auto& v : out) {
            LVec s = v.sub(c, u);
            if (s.l >= 0) acc += (int)s.l + 1;
        }
        return acc;
    };
    for (const LVec& u : cand) {
        if ((long)out.size() == r) break;
        while ((long)out.size() < r && h(u) - peeled_h(u) > 0) {
            out.push_back(u);
            rem = rem - K0Class::line(c, u);
        }
    }
    if ((long)out.size() != r) throw std::logic_error("split_bundle_part: could not peel all lines");
    if (!rem.is_zero()) throw std::logic_error("split_bundle_part: class mismatch");
    return out;
}

}  // namespace ihall
