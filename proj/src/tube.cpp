#include "ihall/tube.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <stdexcept>

namespace ihall {

namespace {
int wrap(int j, int n) { return ((j % n) + n) % n; }
}

TubeClass TubeClass::uniserial(int top, int len, int n) {
    TubeClass c;
    c.add_part(top, len, n);
    return c;
}

TubeClass& TubeClass::add_part(int top, int len, int n) {
    if (len <= 0) throw std::invalid_argument("part length must be positive");
    parts.push_back({wrap(top, n), len});
    canonicalize();
    return *this;
}

void TubeClass::canonicalize() {
    std::sort(parts.begin(), parts.end(), [](auto& a, auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
}

int TubeClass::total_length() const {
    int s = 0;
    for (auto& [t, l] : parts) s += l;
    return s;
}

std::vector<int> TubeClass::dim_vector(int n) const {
    std::vector<int> d(n, 0);
    for (auto& [t, l] : parts)
        for (int k = 0; k < l; ++k) d[wrap(t - k, n)] += 1;
    return d;
}

std::vector<int> TubeClass::partition() const {
    std::vector<int> p;
    for (auto& [t, l] : parts) p.push_back(l);
    std::sort(p.rbegin(), p.rend());
    return p;
}

std::string TubeClass::str() const {
    if (parts.empty()) return "0";
    std::string s;
    for (auto& [t, l] : parts) {
        if (!s.empty()) s += "+";
        s += "S" + std::to_string(t) + "^" + std::to_string(l);
    }
    return s;
}

int mat_rank(const FieldTable& F, Mat m) {
    if (m.empty()) return 0;
    int rows = (int)m.size(), cols = (int)m[0].size();
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        int inv = F.inv(m[r][c]);
        for (int j = c; j < cols; ++j) m[r][j] = F.mul(m[r][j], inv);
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            int f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] = F.sub(m[i][j], F.mul(f, m[r][j]));
        }
        ++r;
    }
    return r;
}

std::vector<std::vector<int>> mat_nullspace(const FieldTable& F, Mat m) {
    if (m.empty()) return {};
    int rows = (int)m.size(), cols = (int)m[0].size();
    std::vector<int> pivot_of_col(cols, -1);
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        int inv = F.inv(m[r][c]);
        for (int j = c; j < cols; ++j) m[r][j] = F.mul(m[r][j], inv);
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            int f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] = F.sub(m[i][j], F.mul(f, m[r][j]));
        }
        pivot_of_col[c] = r;
        ++r;
    }
    std::vector<std::vector<int>> basis;
    for (int c = 0; c < cols; ++c) {
        if (pivot_of_col[c] >= 0) continue;
        std::vector<int> v(cols, 0);
        v[c] = 1;
        for (int c2 = 0; c2 < cols; ++c2)
            if (pivot_of_col[c2] >= 0) v[c2] = F.neg(m[pivot_of_col[c2]][c]);
        basis.push_back(v);
    }
    return basis;
}

Mat mat_rowspace(const FieldTable& F, Mat m) {
    if (m.empty()) return {};
    int rows = (int)m.size(), cols = (int)m[0].size();
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        int inv = F.inv(m[r][c]);
        for (int j = c; j < cols; ++j) m[r][j] = F.mul(m[r][j], inv);
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            int f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] = F.sub(m[i][j], F.mul(f, m[r][j]));
        }
        ++r;
    }
    m.resize(r);
    return m;
}

std::vector<Mat> subspaces(const FieldTable& F, int n, int k) {
    std::vector<Mat> out;
    if (k < 0 || k > n) return out;
    if (k == 0) { out.push_back({}); return out; }
    // choose pivot columns 0 <= c_1 < ... < c_k < n, then free entries
    std::vector<int> piv(k);
    std::function<void(int, int)> choose = [&](int idx, int from) {
        if (idx == k) {
            // free positions: row i, column c with c > piv[i], c not a pivot
            std::vector<std::pair<int, int>> free;
            std::vector<bool> is_piv(n, false);
            for (int i = 0; i < k; ++i) is_piv[piv[i]] = true;
            for (int i = 0; i < k; ++i)
                for (int c = piv[i] + 1; c < n; ++c)
                    if (!is_piv[c]) free.push_back({i, c});
            long total = 1;
            for (size_t i = 0; i < free.size(); ++i) total *= F.size();
            for (long code = 0; code < total; ++code) {
                Mat m(k, std::vector<int>(n, 0));
                for (int i = 0; i < k; ++i) m[i][piv[i]] = 1;
                long x = code;
                for (auto& [i, c] : free) { m[i][c] = (int)(x % F.size()); x /= F.size(); }
                out.push_back(std::move(m));
            }
            return;
        }
        for (int c = from; c <= n - (k - idx); ++c) {
            piv[idx] = c;
            choose(idx + 1, c + 1);
        }
    };
    choose(0, 0);
    return out;
}

mpz_class gl_order(long Q, int m) {
    mpz_class r = 1;
    mpz_class qm = 1;
    for (int i = 0; i < m; ++i) qm *= Q;
    mpz_class qi = 1;
    for (int i = 0; i < m; ++i) {
        r *= (qm - qi);
        qi *= Q;
    }
    return r;
}

TubeModel Tube::model(const TubeClass& c) const {
    TubeModel m;
    m.n = n_;
    m.dim.assign(n_, 0);
    // index bookkeeping: order basis per vertex
    std::vector<std::vector<std::pair<int, int>>> slots(n_);  // (part index, k)
    for (size_t pi = 0; pi < c.parts.size(); ++pi) {
        auto [t, l] = c.parts[pi];
        for (int k = 0; k < l; ++k) slots[wrap(t - k, n_)].push_back({(int)pi, k});
    }
    for (int j = 0; j < n_; ++j) m.dim[j] = (int)slots[j].size();
    m.arrow.resize(n_);
    for (int j = 0; j < n_; ++j) {
        int target = wrap(j - 1, n_);
        m.arrow[j].assign(m.dim[target], std::vector<int>(m.dim[j], 0));
        for (int col = 0; col < m.dim[j]; ++col) {
            auto [pi, k] = slots[j][col];
            auto [t, l] = c.parts[pi];
            if (k + 1 < l) {
                // e_k at vertex j maps to e_{k+1} at vertex j-1
                for (int row = 0; row < m.dim[target]; ++row)
                    if (slots[target][row] == std::make_pair(pi, k + 1)) {
                        m.arrow[j][row][col] = 1;
                        break;
                    }
            }
        }
    }
    return m;
}

namespace {

// dimension of the intertwiner space between two models
long model_hom_dim(const FieldTable& F, const TubeModel& A, const TubeModel& B) {
    int n = A.n;
    std::vector<int> off(n + 1, 0);
    for (int j = 0; j < n; ++j) off[j + 1] = off[j] + A.dim[j] * B.dim[j];
    int unknowns = off[n];
    if (unknowns == 0) return 0;
    // constraints: for each arrow j: B.arrow[j] * phi_j = phi_{j-1} * A.arrow[j]
    Mat sys;
    for (int j = 0; j < n; ++j) {
        int jm = wrap(j - 1, n);
        // rows indexed by (r in B.dim[jm], c in A.dim[j])
        for (int r = 0; r < B.dim[jm]; ++r)
            for (int c = 0; c < A.dim[j]; ++c) {
                std::vector<int> row(unknowns, 0);
                // sum_s B.arrow[j][r][s] phi_j[s][c]
                for (int s = 0; s < B.dim[j]; ++s)
                    if (B.arrow[j][r][s])
                        row[off[j] + s * A.dim[j] + c] =
                            F.add(row[off[j] + s * A.dim[j] + c], B.arrow[j][r][s]);
                // - sum_s phi_{jm}[r][s] A.arrow[j][s][c]
                for (int s = 0; s < A.dim[jm]; ++s)
                    if (A.arrow[j][s][c])
                        row[off[jm] + r * A.dim[jm] + s] =
                            F.sub(row[off[jm] + r * A.dim[jm] + s], A.arrow[j][s][c]);
                bool nz = false;
                for (int v : row)
                    if (v) { nz = true; break; }
                if (nz) sys.push_back(std::move(row));
            }
    }
    return unknowns - (sys.empty() ? 0 : mat_rank(F, std::move(sys)));
}

}  // namespace

long Tube::hom_dim(const TubeClass& a, const TubeClass& b) const {
    auto key = std::make_pair(a, b);
    auto it = hom_cache_.find(key);
    if (it != hom_cache_.end()) return it->second;
    long d = model_hom_dim(*F_, model(a), model(b));
    hom_cache_[key] = d;
    return d;
}

long Tube::euler(const TubeClass& a, const TubeClass& b) const {
    auto da = a.dim_vector(n_), db = b.dim_vector(n_);
    long acc = 0;
    for (int j = 0; j < n_; ++j) {
        acc += (long)da[j] * db[j];
        acc -= (long)da[j] * db[wrap(j - 1, n_)];  // one arrow j -> j-1
    }
    return acc;
}

long Tube::ext_dim(const TubeClass& a, const TubeClass& b) const {
    long e = hom_dim(a, b) - euler(a, b);
    if (e < 0) throw std::logic_error("negative ext dimension");
    return e;
}

mpz_class Tube::aut_order(const TubeClass& a) const {
    // group the parts into isomorphism types with multiplicities
    std::map<std::pair<int, int>, int> mult;
    for (auto& p : a.parts) mult[p] += 1;
    long dim_end = end_dim(a);
    long semisimple = 0;
    mpz_class out = 1;
    for (auto& [p, m] : mult) {
        semisimple += (long)m * m;
        out *= gl_order(residue_size(), m);
    }
    mpz_class qpow;
    mpz_pow_ui(qpow.get_mpz_t(), mpz_class(residue_size()).get_mpz_t(),
               (unsigned long)(dim_end - semisimple));
    return out * qpow;
}

mpz_class Tube::aut_order_brute(const TubeClass& a) const {
    // count invertible elements of End(M) by enumerating the endomorphism space
    TubeModel A = model(a);
    int n = n_;
    std::vector<int> off(n + 1, 0);
    for (int j = 0; j < n; ++j) off[j + 1] = off[j] + A.dim[j] * A.dim[j];
    int unknowns = off[n];
    if (unknowns == 0) return 1;
    Mat sys;
    for (int j = 0; j < n; ++j) {
        int jm = wrap(j - 1, n);
        for (int r = 0; r < A.dim[jm]; ++r)
            for (int c = 0; c < A.dim[j]; ++c) {
                std::vector<int> row(unknowns, 0);
                for (int s = 0; s < A.dim[j]; ++s)
                    if (A.arrow[j][r][s])
                        row[off[j] + s * A.dim[j] + c] =
                            F_->add(row[off[j] + s * A.dim[j] + c], A.arrow[j][r][s]);
                for (int s = 0; s < A.dim[jm]; ++s)
                    if (A.arrow[j][s][c])
                        row[off[jm] + r * A.dim[jm] + s] =
                            F_->sub(row[off[jm] + r * A.dim[jm] + s], A.arrow[j][s][c]);
                sys.push_back(std::move(row));
            }
    }
    auto basis = sys.empty() ? std::vector<std::vector<int>>{} : mat_nullspace(*F_, sys);
    if (sys.empty()) {
        basis.clear();
        for (int i = 0; i < unknowns; ++i) {
            std::vector<int> v(unknowns, 0);
            v[i] = 1;
            basis.push_back(v);
        }
    }
    long total = 1;
    for (size_t i = 0; i < basis.size(); ++i) total *= F_->size();
    long count = 0;
    for (long code = 0; code < total; ++code) {
        std::vector<int> phi(unknowns, 0);
        long x = code;
        for (auto& bvec : basis) {
            int lam = (int)(x % F_->size());
            x /= F_->size();
            if (lam)
                for (int i = 0; i < unknowns; ++i)
                    phi[i] = F_->add(phi[i], F_->mul(lam, bvec[i]));
        }
        bool invertible = true;
        for (int j = 0; j < n && invertible; ++j) {
            if (A.dim[j] == 0) continue;
            Mat mj(A.dim[j], std::vector<int>(A.dim[j]));
            for (int r = 0; r < A.dim[j]; ++r)
                for (int c2 = 0; c2 < A.dim[j]; ++c2) mj[r][c2] = phi[off[j] + r * A.dim[j] + c2];
            if (mat_rank(*F_, mj) < A.dim[j]) invertible = false;
        }
        if (invertible) ++count;
    }
    return count;
}

TubeClass Tube::classify(const TubeModel& m) const {
    // rank signature: R(j, a) = rank of the a-step path map out of vertex j;
    // the summand with socle s and length l contributes through
    // D(j, a) = R(j, a) - R(j, a+1) = #(socle = j - a, len >= a + 1).
    int n = m.n;
    int L = 0;
    for (int d : m.dim) L += d;
    std::vector<std::vector<long>> R(n, std::vector<long>(L + 2, 0));
    for (int j = 0; j < n; ++j) {
        // path: identity then compose arrows
        Mat cur;
        cur.assign(m.dim[j], std::vector<int>(m.dim[j], 0));
        for (int i = 0; i < m.dim[j]; ++i) cur[i][i] = 1;
        R[j][0] = m.dim[j];
        int at = j;
        for (int a = 1; a <= L + 1; ++a) {
            // multiply by arrow out of `at`
            const auto& A = m.arrow[at];
            int tgt = wrap(at - 1, n);
            Mat nxt((size_t)m.dim[tgt], std::vector<int>(m.dim[j], 0));
            for (int r = 0; r < m.dim[tgt]; ++r)
                for (int s = 0; s < m.dim[at]; ++s)
                    if (A[r][s])
                        for (int c = 0; c < m.dim[j]; ++c)
                            if (cur[s][c]) nxt[r][c] = F_->add(nxt[r][c], F_->mul(A[r][s], cur[s][c]));
            cur = std::move(nxt);
            at = tgt;
            R[j][a] = cur.empty() ? 0 : mat_rank(*F_, cur);
        }
    }
    TubeClass out;
    for (int s = 0; s < n; ++s) {
        for (int len = 1; len <= L; ++len) {
            // #(socle s, len = l) = D(s+l-1, l-1) - D(s+l, l)
            int j1 = wrap(s + len - 1, n), j2 = wrap(s + len, n);
            long d1 = R[j1][len - 1] - R[j1][len];
            long d2 = R[j2][len] - R[j2][len + 1];
            long cnt = d1 - d2;
            if (cnt < 0) throw std::logic_error("tube classify: inconsistent rank signature");
            for (long c2 = 0; c2 < cnt; ++c2) out.add_part(s + len - 1, len, n_);
        }
    }
    if (out.dim_vector(n_) != m.dim) throw std::logic_error("tube classify: dimension mismatch");
    return out;
}

std::map<TubeClass, long> Tube::ext_middles(const TubeClass& Mc, const TubeClass& Nc) const {
    // extensions 0 -> N -> E -> M -> 0 enumerated by cocycles
    TubeModel M = model(Mc), N = model(Nc);
    int n = n_;
    std::vector<int> zoff(n + 1, 0);
    for (int j = 0; j < n; ++j) zoff[j + 1] = zoff[j] + N.dim[wrap(j - 1, n)] * M.dim[j];
    int zdim = zoff[n];
    std::vector<int> hoff(n + 1, 0);
    for (int j = 0; j < n; ++j) hoff[j + 1] = hoff[j] + N.dim[j] * M.dim[j];
    int hdim = hoff[n];
    // coboundary rows: columns indexed by cocycle coordinates
    // d(phi)_j = N.arrow[j] . phi_j - phi_{j-1} . M.arrow[j]
    Mat dmat(zdim, std::vector<int>(hdim, 0));
    for (int j = 0; j < n; ++j) {
        int jm = wrap(j - 1, n);
        for (int r = 0; r < N.dim[jm]; ++r)
            for (int c = 0; c < M.dim[j]; ++c) {
                int zrow = zoff[j] + r * M.dim[j] + c;
                for (int s = 0; s < N.dim[j]; ++s)
                    if (N.arrow[j][r][s])
                        dmat[zrow][hoff[j] + s * M.dim[j] + c] =
                            F_->add(dmat[zrow][hoff[j] + s * M.dim[j] + c], N.arrow[j][r][s]);
                for (int s = 0; s < M.dim[jm]; ++s)
                    if (M.arrow[j][s][c])
                        dmat[zrow][hoff[jm] + r * M.dim[jm] + s] =
                            F_->sub(dmat[zrow][hoff[jm] + r * M.dim[jm] + s], M.arrow[j][s][c]);
            }
    }
    // image basis of d, then a complement inside the cocycle space
    Mat img;
    {
        // transpose picture: rows = images of unit phis
        Mat cols(hdim, std::vector<int>(zdim, 0));
        for (int r = 0; r < zdim; ++r)
            for (int c = 0; c < hdim; ++c) cols[c][r] = dmat[r][c];
        img = mat_rowspace(*F_, std::move(cols));
    }
    // greedily extend img rows to a basis of F^zdim; the added unit vectors
    // index complement coordinates
    std::vector<int> complement;
    {
        Mat basis = img;
        for (int v = 0; v < zdim; ++v) {
            Mat test = basis;
            std::vector<int> unit(zdim, 0);
            unit[v] = 1;
            test.push_back(unit);
            if (mat_rank(*F_, test) > (int)basis.size()) {
                basis.push_back(unit);
                complement.push_back(v);
            }
        }
    }
    long e = (long)complement.size();
    long expected = ext_dim(Mc, Nc);
    if (e != expected) throw std::logic_error("ext cocycle dimension mismatch");
    std::map<TubeClass, long> out;
    long total = 1;
    for (long i = 0; i < e; ++i) total *= F_->size();
    for (long code = 0; code < total; ++code) {
        std::vector<int> xi(zdim, 0);
        long x = code;
        for (long i = 0; i < e; ++i) {
            int lam = (int)(x % F_->size());
            x /= F_->size();
            if (lam) xi[complement[i]] = F_->add(xi[complement[i]], lam);
        }
        // middle model: V_j = N_j (+) M_j
        TubeModel E;
        E.n = n;
        E.dim.resize(n);
        for (int j = 0; j < n; ++j) E.dim[j] = N.dim[j] + M.dim[j];
        E.arrow.resize(n);
        for (int j = 0; j < n; ++j) {
            int jm = wrap(j - 1, n);
            E.arrow[j].assign(E.dim[jm], std::vector<int>(E.dim[j], 0));
            for (int r = 0; r < N.dim[jm]; ++r) {
                for (int c = 0; c < N.dim[j]; ++c) E.arrow[j][r][c] = N.arrow[j][r][c];
                for (int c = 0; c < M.dim[j]; ++c)
                    E.arrow[j][r][N.dim[j] + c] = xi[zoff[j] + r * M.dim[j] + c];
            }
            for (int r = 0; r < M.dim[jm]; ++r)
                for (int c = 0; c < M.dim[j]; ++c)
                    E.arrow[j][N.dim[jm] + r][N.dim[j] + c] = M.arrow[j][r][c];
        }
        out[classify(E)] += 1;
    }
    return out;
}

long Tube::hall_number(const TubeClass& L, const TubeClass& M, const TubeClass& N) const {
    // quick class check
    auto dl = L.dim_vector(n_), dm = M.dim_vector(n_), dn = N.dim_vector(n_);
    for (int j = 0; j < n_; ++j)
        if (dl[j] != dm[j] + dn[j]) return 0;
    TubeModel Lm = model(L);
    // enumerate per-vertex subspaces of the right dimension, arrow-closed
    std::vector<std::vector<Mat>> cand(n_);
    for (int j = 0; j < n_; ++j) cand[j] = subspaces(*F_, Lm.dim[j], dn[j]);
    long count = 0;
    std::vector<const Mat*> pick(n_);
    std::function<void(int)> rec = [&](int j) {
        if (j == n_) {
            // verify closure, build sub and quotient models, classify
            // closure: arrow[j] * X_j  within X_{j-1}
            for (int v = 0; v < n_; ++v) {
                int vm = wrap(v - 1, n_);
                // rows of X_v mapped by arrow
                const Mat& Xv = *pick[v];
                const Mat& Xvm = *pick[vm];
                Mat test = Xvm;
                for (auto& row : Xv) {
                    std::vector<int> img(Lm.dim[vm], 0);
                    for (int r = 0; r < Lm.dim[vm]; ++r)
                        for (int c = 0; c < Lm.dim[v]; ++c)
                            if (Lm.arrow[v][r][c] && row[c])
                                img[r] = F_->add(img[r], F_->mul(Lm.arrow[v][r][c], row[c]));
                    test.push_back(img);
                }
                if (mat_rank(*F_, test) != (int)Xvm.size()) return;
            }
            // sub model: restrict arrows to X coordinates
            TubeModel Sub, Quot;
            Sub.n = Quot.n = n_;
            Sub.dim.resize(n_);
            Quot.dim.resize(n_);
            // quotient bases: complete X_v to a basis with unit vectors
            std::vector<Mat> full(n_);       // rows: X basis then complement units
            std::vector<Mat> fullinv(n_);    // inverse transpose for coordinates
            for (int v = 0; v < n_; ++v) {
                Sub.dim[v] = (int)pick[v]->size();
                Quot.dim[v] = Lm.dim[v] - Sub.dim[v];
                Mat basis = *pick[v];
                for (int u = 0; u < Lm.dim[v] && (int)basis.size() < Lm.dim[v]; ++u) {
                    Mat test = basis;
                    std::vector<int> unit(Lm.dim[v], 0);
                    unit[u] = 1;
                    test.push_back(unit);
                    if (mat_rank(*F_, test) > (int)basis.size()) basis.push_back(unit);
                }
                full[v] = basis;
                // invert basis matrix (square): coordinates of std vectors in basis
                int d = Lm.dim[v];
                Mat aug(d, std::vector<int>(2 * d, 0));
                for (int r = 0; r < d; ++r) {
                    for (int c = 0; c < d; ++c) aug[r][c] = basis[c][r];  // columns are basis vectors
                    aug[r][d + r] = 1;
                }
                // gauss
                for (int c = 0, rr = 0; c < d && rr < d; ++c) {
                    int piv = -1;
                    for (int i = rr; i < d; ++i)
                        if (aug[i][c]) { piv = i; break; }
                    std::swap(aug[rr], aug[piv]);
                    int inv = F_->inv(aug[rr][c]);
                    for (int cc = 0; cc < 2 * d; ++cc) aug[rr][cc] = F_->mul(aug[rr][cc], inv);
                    for (int i = 0; i < d; ++i) {
                        if (i == rr || !aug[i][c]) continue;
                        int f = aug[i][c];
                        for (int cc = 0; cc < 2 * d; ++cc)
                            aug[i][cc] = F_->sub(aug[i][cc], F_->mul(f, aug[rr][cc]));
                    }
                    ++rr;
                }
                Mat inv(d, std::vector<int>(d));
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) inv[r][c] = aug[r][d + c];
                fullinv[v] = inv;  // inv * std_vector = coordinates in `basis`
            }
            Sub.arrow.resize(n_);
            Quot.arrow.resize(n_);
            bool ok = true;
            for (int v = 0; v < n_ && ok; ++v) {
                int vm = wrap(v - 1, n_);
                Sub.arrow[v].assign(Sub.dim[vm], std::vector<int>(Sub.dim[v], 0));
                Quot.arrow[v].assign(Quot.dim[vm], std::vector<int>(Quot.dim[v], 0));
                for (int c = 0; c < Lm.dim[v]; ++c) {
                    // image of basis vector c of full[v]
                    std::vector<int> img(Lm.dim[vm], 0);
                    for (int r = 0; r < Lm.dim[vm]; ++r)
                        for (int s = 0; s < Lm.dim[v]; ++s)
                            if (Lm.arrow[v][r][s] && full[v][c][s])
                                img[r] = F_->add(img[r], F_->mul(Lm.arrow[v][r][s], full[v][c][s]));
                    // coordinates in full[vm]
                    std::vector<int> coord(Lm.dim[vm], 0);
                    for (int r = 0; r < Lm.dim[vm]; ++r)
                        for (int s = 0; s < Lm.dim[vm]; ++s)
                            if (fullinv[vm][r][s] && img[s])
                                coord[r] = F_->add(coord[r], F_->mul(fullinv[vm][r][s], img[s]));
                    if (c < Sub.dim[v]) {
                        for (int r = 0; r < Sub.dim[vm]; ++r) Sub.arrow[v][r][c] = coord[r];
                        // sub closure already checked
                    } else {
                        for (int r = 0; r < Quot.dim[vm]; ++r)
                            Quot.arrow[v][r][c - Sub.dim[v]] = coord[Sub.dim[vm] + r];
                    }
                }
            }
            if (!ok) return;
            if (classify(Sub) == N && classify(Quot) == M) ++count;
            return;
        }
        for (const Mat& m2 : cand[j]) {
            pick[j] = &m2;
            rec(j + 1);
        }
    };
    rec(0);
    return count;
}

mpz_class Tube::ext_count_with_middle(const TubeClass& M, const TubeClass& N, const TubeClass& L) const {
    long F = hall_number(L, M, N);
    if (F == 0) return 0;
    mpz_class num = mpz_class(F) * aut_order(M) * aut_order(N);
    mpz_class den = aut_order(L);
    mpz_class qh;
    mpz_pow_ui(qh.get_mpz_t(), mpz_class(residue_size()).get_mpz_t(), (unsigned long)hom_dim(M, N));
    num *= qh;
    mpz_class r, rem;
    mpz_tdiv_qr(r.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (rem != 0) throw std::logic_error("Riedtmann-Peng count not integral");
    return r;
}

std::vector<TubeClass> Tube::classes_with_dim_at_most(const std::vector<int>& bound) const {
    std::vector<TubeClass> out;
    std::vector<int> cur(n_, 0);
    std::function<void(int)> rec = [&](int j) {
        if (j == n_) {
            auto cs = classes_with_dim(cur);
            out.insert(out.end(), cs.begin(), cs.end());
            return;
        }
        for (int v = 0; v <= bound[j]; ++v) {
            cur[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<TubeClass> Tube::classes_with_dim(const std::vector<int>& dims) const {
    // multisets of uniserials with the given dimension vector, built in the
    // canonical (len desc, top asc) part order
    std::vector<TubeClass> out;
    int total = 0;
    for (int d : dims) total += d;
    TubeClass acc;
    std::vector<int> rem = dims;
    std::function<void(int, int, int)> rec = [&](int left, int prev_len, int prev_top) {
        if (left == 0) {
            out.push_back(acc);
            return;
        }
        for (int len = std::min(prev_len, left); len >= 1; --len) {
            int tstart = (len == prev_len) ? prev_top : 0;
            for (int top = tstart; top < n_; ++top) {
                bool fit = true;
                for (int k = 0; k < len && fit; ++k)
                    if (rem[wrap(top - k, n_)] <= 0) fit = false;
                if (!fit) continue;
                for (int k = 0; k < len; ++k) rem[wrap(top - k, n_)] -= 1;
                acc.parts.push_back({top, len});
                rec(left - len, len, top);
                acc.parts.pop_back();
                for (int k = 0; k < len; ++k) rem[wrap(top - k, n_)] += 1;
            }
        }
    };
    rec(total, total, 0);
    for (auto& c : out) c.canonicalize();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<Mat>> Tube::hom_basis(const TubeClass& a, const TubeClass& b) const {
    TubeModel A = model(a), B = model(b);
    int n = n_;
    std::vector<int> off(n + 1, 0);
    for (int j = 0; j < n; ++j) off[j + 1] = off[j] + A.dim[j] * B.dim[j];
    int unknowns = off[n];
    std::vector<std::vector<Mat>> out;
    if (unknowns == 0) return out;
    Mat sys;
    for (int j = 0; j < n; ++j) {
        int jm = wrap(j - 1, n);
        for (int r = 0; r < B.dim[jm]; ++r)
            for (int c = 0; c < A.dim[j]; ++c) {
                std::vector<int> row(unknowns, 0);
                for (int s = 0; s < B.dim[j]; ++s)
                    if (B.arrow[j][r][s])
                        row[off[j] + s * A.dim[j] + c] =
                            F_->add(row[off[j] + s * A.dim[j] + c], B.arrow[j][r][s]);
                for (int s = 0; s < A.dim[jm]; ++s)
                    if (A.arrow[j][s][c])
                        row[off[jm] + r * A.dim[jm] + s] =
                            F_->sub(row[off[jm] + r * A.dim[jm] + s], A.arrow[j][s][c]);
                sys.push_back(std::move(row));
            }
    }
    std::vector<std::vector<int>> ns;
    if (sys.empty()) {
        for (int i = 0; i < unknowns; ++i) {
            std::vector<int> v(unknowns, 0);
            v[i] = 1;
            ns.push_back(v);
        }
    } else {
        ns = mat_nullspace(*F_, sys);
    }
    for (auto& v : ns) {
        std::vector<Mat> phi(n);
        for (int j = 0; j < n; ++j) {
            phi[j].assign(B.dim[j], std::vector<int>(A.dim[j], 0));
            for (int s = 0; s < B.dim[j]; ++s)
                for (int c = 0; c < A.dim[j]; ++c) phi[j][s][c] = v[off[j] + s * A.dim[j] + c];
        }
        out.push_back(std::move(phi));
    }
    return out;
}

TubeModel Tube::map_kernel(const TubeModel& A, const TubeModel& B, const std::vector<Mat>& f) const {
    int n = n_;
    std::vector<Mat> basis(n);
    TubeModel K;
    K.n = n;
    K.dim.assign(n, 0);
    for (int j = 0; j < n; ++j) {
        if (A.dim[j] == 0) continue;
        if (B.dim[j] == 0 || f[j].empty()) {
            basis[j].assign(A.dim[j], std::vector<int>(A.dim[j], 0));
            for (int i = 0; i < A.dim[j]; ++i) basis[j][i][i] = 1;
        } else {
            basis[j] = Mat{};
            for (auto& v : mat_nullspace(*F_, f[j])) basis[j].push_back(v);
        }
        K.dim[j] = (int)basis[j].size();
    }
    K.arrow.assign(n, Mat{});
    for (int j = 0; j < n; ++j) {
        int jm = wrap(j - 1, n);
        Mat m(K.dim[jm], std::vector<int>(K.dim[j], 0));
        for (int col = 0; col < K.dim[j]; ++col) {
            std::vector<int> img(A.dim[jm], 0);
            for (int r = 0; r < A.dim[jm]; ++r)
                for (int s = 0; s < A.dim[j]; ++s)
                    if (A.arrow[j][r][s] && basis[j][col][s])
                        img[r] = F_->add(img[r], F_->mul(A.arrow[j][r][s], basis[j][col][s]));
            // solve in basis[jm]
            int db = A.dim[jm];
            Mat sys(db, std::vector<int>(K.dim[jm] + 1, 0));
            for (int r = 0; r < db; ++r) {
                for (int b = 0; b < K.dim[jm]; ++b) sys[r][b] = basis[jm][b][r];
                sys[r][K.dim[jm]] = img[r];
            }
            int rr = 0;
            std::vector<int> pivcols;
            for (int cc = 0; cc < K.dim[jm] && rr < db; ++cc) {
                int piv = -1;
                for (int i = rr; i < db; ++i)
                    if (sys[i][cc]) { piv = i; break; }
                if (piv < 0) continue;
                std::swap(sys[rr], sys[piv]);
                int inv = F_->inv(sys[rr][cc]);
                for (auto& x : sys[rr]) x = F_->mul(x, inv);
                for (int i = 0; i < db; ++i) {
                    if (i == rr || !sys[i][cc]) continue;
                    int fa = sys[i][cc];
                    for (size_t jj = 0; jj < sys[i].size(); ++jj)
                        sys[i][jj] = F_->sub(sys[i][jj], F_->mul(fa, sys[rr][jj]));
                }
                pivcols.push_back(cc);
                ++rr;
            }
            for (size_t pr = 0; pr < pivcols.size(); ++pr) m[pivcols[pr]][col] = sys[pr][K.dim[jm]];
        }
        K.arrow[j] = std::move(m);
    }
    return K;
}

TubeModel Tube::map_cokernel(const TubeModel& A, const TubeModel& B, const std::vector<Mat>& f) const {
    int n = n_;
    TubeModel C;
    C.n = n;
    C.dim.assign(n, 0);
    std::vector<std::vector<int>> comp(n);
    std::vector<Mat> proj(n);
    for (int j = 0; j < n; ++j) {
        int db = B.dim[j];
        if (db == 0) continue;
        Mat img;
        if (!f[j].empty() && A.dim[j] > 0)
            for (int col = 0; col < A.dim[j]; ++col) {
                std::vector<int> v(db, 0);
                for (int r = 0; r < db; ++r) v[r] = f[j][r][col];
                img.push_back(std::move(v));
            }
        Mat red = img.empty() ? Mat{} : mat_rowspace(*F_, img);
        std::vector<int> pivots;
        for (auto& row : red) {
            int lead = -1;
            for (int jj = 0; jj < db; ++jj)
                if (row[jj]) { lead = jj; break; }
            pivots.push_back(lead);
        }
        std::vector<bool> is_piv(db, false);
        for (int pv : pivots) is_piv[pv] = true;
        for (int jj = 0; jj < db; ++jj)
            if (!is_piv[jj]) comp[j].push_back(jj);
        C.dim[j] = (int)comp[j].size();
        proj[j] = Mat(C.dim[j], std::vector<int>(db, 0));
        for (int u = 0; u < db; ++u) {
            std::vector<int> v(db, 0);
            v[u] = 1;
            for (size_t r = 0; r < red.size(); ++r)
                if (v[pivots[r]]) {
                    int fa = v[pivots[r]];
                    for (int jj = 0; jj < db; ++jj) v[jj] = F_->sub(v[jj], F_->mul(fa, red[r][jj]));
                }
            for (int r = 0; r < C.dim[j]; ++r) proj[j][r][u] = v[comp[j][r]];
        }
    }
    C.arrow.assign(n, Mat{});
    for (int j = 0; j < n; ++j) {
        int jm = wrap(j - 1, n);
        Mat m(C.dim[jm], std::vector<int>(C.dim[j], 0));
        for (int col = 0; col < C.dim[j]; ++col) {
            std::vector<int> v(B.dim[j], 0);
            v[comp[j][col]] = 1;
            std::vector<int> img(B.dim[jm], 0);
            for (int r = 0; r < B.dim[jm]; ++r)
                for (int s = 0; s < B.dim[j]; ++s)
                    if (B.arrow[j][r][s] && v[s]) img[r] = F_->add(img[r], F_->mul(B.arrow[j][r][s], v[s]));
            for (int r = 0; r < C.dim[jm]; ++r) {
                int acc = 0;
                for (int s = 0; s < B.dim[jm]; ++s)
                    if (proj[jm][r][s] && img[s]) acc = F_->add(acc, F_->mul(proj[jm][r][s], img[s]));
                m[r][col] = acc;
            }
        }
        C.arrow[j] = std::move(m);
    }
    return C;
}

std::vector<int> Tube::socle(const TubeClass& a) const {
    std::vector<int> s;
    for (auto& [t, l] : a.parts) s.push_back(wrap(t - l + 1, n_));
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace ihall
