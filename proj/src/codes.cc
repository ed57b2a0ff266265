// Copyright 2026 The msi-workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msi/codes.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace msi {

using nlohmann::json;

PauliTerm CssCode::stabilizer(size_t r) const {
    if (r < hx.rows()) return PauliTerm::x_type(hx.row(r));
    return PauliTerm::z_type(hz.row(r - hx.rows()));
}

BitMatrix bb_polynomial(size_t ell, size_t m, const std::vector<std::pair<int, int>> &monomials) {
    size_t n = ell * m;
    BitMatrix out(n, n);
    for (auto [p, q] : monomials) {
        size_t pp = ((p % (int)ell) + ell) % ell;
        size_t qq = ((q % (int)m) + m) % m;
        for (size_t i = 0; i < ell; ++i) {
            for (size_t j = 0; j < m; ++j) {
                out.flip(i * m + j, ((i + pp) % ell) * m + (j + qq) % m);
            }
        }
    }
    return out;
}

CssCode build_bb(const BbSpec &spec) {
    if (spec.ell == 0 || spec.m == 0) throw std::invalid_argument("build_bb: ell and m must be positive");
    BitMatrix a = bb_polynomial(spec.ell, spec.m, spec.a_monomials);
    BitMatrix b = bb_polynomial(spec.ell, spec.m, spec.b_monomials);
    return make_css(a.hstack(b), b.transpose().hstack(a.transpose()));
}

CssCode build_hgp(const HgpSpec &spec) {
    const BitMatrix &h1 = spec.h1, &h2 = spec.h2;
    if (h1.rows() == 0 || h1.cols() == 0 || h2.rows() == 0 || h2.cols() == 0 || h1.is_zero() || h2.is_zero()) {
        throw std::invalid_argument("build_hgp: check matrices must be nonzero");
    }
    size_t r1 = h1.rows(), n1 = h1.cols(), r2 = h2.rows(), n2 = h2.cols();
    BitMatrix hx = h1.kron(BitMatrix::identity(n2)).hstack(BitMatrix::identity(r1).kron(h2.transpose()));
    BitMatrix hz = BitMatrix::identity(n1).kron(h2).hstack(h1.transpose().kron(BitMatrix::identity(r2)));
    return make_css(std::move(hx), std::move(hz));
}

CssCode make_css(BitMatrix hx, BitMatrix hz) {
    if (hx.cols() != hz.cols()) throw std::invalid_argument("make_css: hx and hz widths differ");
    CssCode code;
    code.n = hx.cols();
    code.hx = std::move(hx);
    code.hz = std::move(hz);
    if (!(code.hx * code.hz.transpose()).is_zero()) throw std::invalid_argument("make_css: hx hz^T != 0");
    std::tie(code.logical_x, code.logical_z) = compute_logicals(code.hx, code.hz);
    return reduce_weight(code);
}

CssCode steane_code() {
    auto h = BitMatrix::from_strings({"1010101", "0110011", "0001111"});
    return make_css(h, h);
}

BbSpec gross_code_spec() { return BbSpec{12, 6, {{0, 0}, {0, 1}, {3, -1}}, {{0, 0}, {1, 0}, {-1, -3}}}; }

namespace {

std::vector<BitVec> independent_mod(const BitMatrix &candidates, const BitMatrix &modulo) {
    RowSpace rs(modulo.cols());
    for (size_t r = 0; r < modulo.rows(); ++r) rs.insert(modulo.row(r));
    std::vector<BitVec> out;
    for (size_t r = 0; r < candidates.rows(); ++r) {
        BitVec v = candidates.row(r);
        if (rs.insert(v)) out.push_back(std::move(v));
    }
    return out;
}

// Multiplies `v` by the row that lowers its weight most (lowest index on
// ties), until none does. When no single row helps, pairs of rows are tried
// before giving up. Returns the number of moves applied.
size_t greedy_descent(BitVec &v, const std::vector<BitVec> &moves) {
    size_t applied = 0;
    while (true) {
        size_t w = v.popcount();
        size_t best = moves.size(), best_w = w;
        for (size_t r = 0; r < moves.size(); ++r) {
            size_t nw = (v ^ moves[r]).popcount();
            if (nw < best_w) {
                best_w = nw;
                best = r;
            }
        }
        if (best != moves.size()) {
            v ^= moves[best];
            ++applied;
            continue;
        }
        size_t pa = 0, pb = 0;
        for (size_t a = 0; a < moves.size(); ++a) {
            BitVec va = v ^ moves[a];
            for (size_t b = a + 1; b < moves.size(); ++b) {
                size_t nw = (va ^ moves[b]).popcount();
                if (nw < best_w) {
                    best_w = nw;
                    pa = a;
                    pb = b;
                }
            }
        }
        if (best_w == w) return applied;
        v ^= moves[pa];
        v ^= moves[pb];
        ++applied;
    }
}

std::vector<BitVec> rows_of(const BitMatrix &m) {
    std::vector<BitVec> out;
    for (size_t r = 0; r < m.rows(); ++r) out.push_back(m.row(r));
    return out;
}

bool lighter(const BitVec &a, const BitVec &b) {
    size_t wa = a.popcount(), wb = b.popcount();
    return wa != wb ? wa < wb : a < b;
}

// Prange-style information-set sampling: each random column order exposes the
// rows of a systematic generator, which are short codeword candidates.
std::vector<BitVec> isd_words(const BitMatrix &gen, size_t iterations, std::mt19937_64 &rng) {
    size_t n = gen.cols();
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<BitVec> out;
    for (size_t it = 0; it < iterations; ++it) {
        std::shuffle(perm.begin(), perm.end(), rng);
        RrefResult rr = rref(gen.permute_columns(perm));
        for (size_t r = 0; r < rr.rank; ++r) {
            BitVec w(n);
            for (size_t c : rr.reduced.row_support(r)) w.set(perm[c], true);
            out.push_back(std::move(w));
        }
    }
    return out;
}

BitVec permute_bits(const BitVec &v, const std::vector<size_t> &perm) {
    BitVec out(v.size());
    for (size_t j : v.ones()) out.set(perm[j], true);
    return out;
}

// Keeps the `keep` shortest distinct words, extended by symmetry orbits.
std::vector<BitVec> shortlist(std::vector<BitVec> words, const std::vector<std::vector<size_t>> &symmetries,
                              size_t keep) {
    std::sort(words.begin(), words.end(), lighter);
    words.erase(std::unique(words.begin(), words.end()), words.end());
    if (words.size() > keep) words.resize(keep);
    std::vector<BitVec> all = words;
    for (const auto &w : words) {
        for (const auto &perm : symmetries) all.push_back(permute_bits(w, perm));
    }
    std::sort(all.begin(), all.end(), lighter);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

}  // namespace

std::pair<std::vector<PauliTerm>, std::vector<PauliTerm>> compute_logicals(const BitMatrix &hx, const BitMatrix &hz) {
    std::vector<BitVec> xs = independent_mod(kernel(hz), hx);
    std::vector<BitVec> zs = independent_mod(kernel(hx), hz);
    if (xs.size() != zs.size()) throw std::logic_error("compute_logicals: mismatched logical counts");
    size_t k = xs.size();
    std::vector<PauliTerm> lx, lz;
    if (k == 0) return {lx, lz};
    // Pairing matrix M_ij = X_i . Z_j; replace Z by (M^-1)^T Z so that M becomes I.
    BitMatrix m(k, k);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) m.set(i, j, xs[i].dot(zs[j]));
    }
    auto inv = inverse(m);
    if (!inv) throw std::logic_error("compute_logicals: singular pairing matrix");
    BitMatrix nt = inv->transpose();
    for (size_t i = 0; i < k; ++i) {
        lx.push_back(PauliTerm::x_type(xs[i]));
        BitVec z(hx.cols());
        for (size_t l = 0; l < k; ++l) {
            if (nt.get(i, l)) z ^= zs[l];
        }
        lz.push_back(PauliTerm::z_type(z));
    }
    return {lx, lz};
}

CssCode reduce_weight(const CssCode &code, bool use_logicals) {
    CssCode out = code;
    std::vector<BitVec> xmoves = rows_of(code.hx), zmoves = rows_of(code.hz);
    size_t k = code.k();
    std::vector<BitVec> xs, zs;
    for (size_t i = 0; i < k; ++i) {
        xs.push_back(code.logical_x[i].xs());
        zs.push_back(code.logical_z[i].zs());
    }
    for (auto &v : xs) greedy_descent(v, xmoves);
    for (auto &v : zs) greedy_descent(v, zmoves);
    if (use_logicals) {
        // X_i <- X_i X_j needs Z_j <- Z_j Z_i to keep the pairing. A move is kept
        // only when the total weight of both touched representatives drops.
        auto try_move = [&](std::vector<BitVec> &a, std::vector<BitVec> &b, const std::vector<BitVec> &bmoves,
                            size_t i, size_t j) {
            BitVec ai = a[i] ^ a[j], bj = b[j] ^ b[i];
            greedy_descent(bj, bmoves);
            if (ai.popcount() + bj.popcount() >= a[i].popcount() + b[j].popcount()) return false;
            a[i] = std::move(ai);
            b[j] = std::move(bj);
            return true;
        };
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < k; ++i) {
                for (size_t j = 0; j < k; ++j) {
                    if (i == j) continue;
                    changed |= try_move(xs, zs, zmoves, i, j);
                    changed |= try_move(zs, xs, xmoves, i, j);
                }
            }
        }
    }
    for (size_t i = 0; i < k; ++i) {
        out.logical_x[i] = PauliTerm::x_type(xs[i]);
        out.logical_z[i] = PauliTerm::z_type(zs[i]);
    }
    return out;
}

std::vector<std::vector<size_t>> bb_translations(size_t ell, size_t m) {
    std::vector<std::vector<size_t>> out;
    size_t half = ell * m;
    for (size_t a = 0; a < ell; ++a) {
        for (size_t b = 0; b < m; ++b) {
            if (a == 0 && b == 0) continue;
            std::vector<size_t> perm(2 * half);
            for (size_t i = 0; i < ell; ++i) {
                for (size_t j = 0; j < m; ++j) {
                    size_t src = i * m + j, dst = ((i + a) % ell) * m + (j + b) % m;
                    perm[src] = dst;
                    perm[half + src] = half + dst;
                }
            }
            out.push_back(std::move(perm));
        }
    }
    return out;
}

CssCode search_short_logicals(const CssCode &code, uint64_t seed, size_t iterations,
                              const std::vector<std::vector<size_t>> &symmetries) {
    size_t k = code.k(), n = code.n;
    if (k == 0) return code;
    std::mt19937_64 rng(seed);
    const size_t keep = 64;

    // X basis: shortest words of ker(hz) that are independent modulo the stabilizers.
    RowSpace xstab(n);
    for (size_t r = 0; r < code.hx.rows(); ++r) xstab.insert(code.hx.row(r));
    std::vector<BitVec> xcand;
    for (auto &w : isd_words(kernel(code.hz), iterations, rng)) {
        if (!xstab.contains(w)) xcand.push_back(std::move(w));
    }
    for (const auto &l : code.logical_x) xcand.push_back(l.xs());
    xcand = shortlist(std::move(xcand), symmetries, keep);
    std::vector<BitVec> xs;
    RowSpace xspan = xstab;
    for (const auto &w : xcand) {
        if (xs.size() == k) break;
        if (xspan.insert(w)) xs.push_back(w);
    }
    if (xs.size() < k) return code;

    // Z partners: short words of ker(hx) whose pairing pattern against the
    // chosen X basis is a unit vector. Sums of two words extend the reach.
    auto pattern = [&](const BitVec &w) {
        BitVec p(k);
        for (size_t i = 0; i < k; ++i) p.set(i, xs[i].dot(w));
        return p;
    };
    std::vector<BitVec> zcand = isd_words(kernel(code.hx), iterations, rng);
    for (const auto &l : code.logical_z) zcand.push_back(l.zs());
    // Short stabilizer-equivalent words have zero pattern and are useless.
    std::erase_if(zcand, [&](const BitVec &w) { return pattern(w).none(); });
    zcand = shortlist(std::move(zcand), symmetries, keep);
    std::map<BitVec, BitVec> best;  // pattern -> shortest word
    auto offer = [&](const BitVec &w) {
        BitVec p = pattern(w);
        auto it = best.find(p);
        if (it == best.end() || lighter(w, it->second)) best[p] = w;
    };
    for (const auto &w : zcand) offer(w);
    std::vector<std::pair<BitVec, BitVec>> entries(best.begin(), best.end());
    for (size_t a = 0; a < entries.size(); ++a) {
        for (size_t b = a + 1; b < entries.size(); ++b) {
            BitVec p = entries[a].first ^ entries[b].first;
            if (p.popcount() == 1) offer(entries[a].second ^ entries[b].second);
        }
    }

    CssCode out = code;
    for (size_t i = 0; i < k; ++i) {
        BitVec e(k);
        e.set(i, true);
        auto it = best.find(e);
        if (it == best.end()) return code;
        out.logical_x[i] = PauliTerm::x_type(xs[i]);
        out.logical_z[i] = PauliTerm::z_type(it->second);
    }
    return reduce_weight(out);
}

BitVec bb_mirror(const BitVec &v, size_t ell, size_t m) {
    size_t half = ell * m;
    if (v.size() != 2 * half) throw std::invalid_argument("bb_mirror: length mismatch");
    BitVec out(2 * half);
    for (size_t q : v.ones()) {
        size_t block = q / half, idx = q % half;
        size_t i = idx / m, j = idx % m;
        size_t t = ((ell - i) % ell) * m + (m - j) % m;
        out.set((1 - block) * half + t, true);
    }
    return out;
}

std::vector<BitVec> min_weight_x_logicals(const CssCode &code, uint64_t seed, size_t iterations,
                                          const std::vector<std::vector<size_t>> &symmetries) {
    std::mt19937_64 rng(seed);
    RowSpace xstab(code.n);
    for (size_t r = 0; r < code.hx.rows(); ++r) xstab.insert(code.hx.row(r));
    std::vector<BitVec> words;
    for (auto &w : isd_words(kernel(code.hz), iterations, rng)) {
        if (!xstab.contains(w)) words.push_back(std::move(w));
    }
    for (const auto &l : code.logical_x) words.push_back(l.xs());
    if (words.empty()) return words;
    size_t wmin = SIZE_MAX;
    for (const auto &w : words) wmin = std::min(wmin, w.popcount());
    std::erase_if(words, [&](const BitVec &w) { return w.popcount() != wmin; });
    return shortlist(std::move(words), symmetries, SIZE_MAX);
}

std::vector<std::pair<BitVec, BitVec>> greedy_symplectic_pairs(const CssCode &code, const std::vector<BitVec> &xpool,
                                                               const std::vector<BitVec> &zpool, std::mt19937_64 &rng,
                                                               const std::vector<std::pair<BitVec, BitVec>> &fixed) {
    size_t k = code.k();
    RowSpace xspan(code.n);
    for (size_t r = 0; r < code.hx.rows(); ++r) xspan.insert(code.hx.row(r));
    std::vector<size_t> order(xpool.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<BitVec, BitVec>> out;
    for (const auto &[x, z] : fixed) {
        if (out.size() == k || xspan.contains(x)) throw std::invalid_argument("symplectic basis: dependent fixed pair");
        out.emplace_back(x, z);
        xspan.insert(x);
    }
    for (size_t idx : order) {
        if (out.size() == k) break;
        const BitVec &x = xpool[idx];
        bool ok = true;
        for (const auto &p : out) ok = ok && !x.dot(p.second);
        if (!ok || xspan.contains(x)) continue;
        std::vector<size_t> partners;
        for (size_t c = 0; c < zpool.size(); ++c) {
            const BitVec &z = zpool[c];
            if (!z.dot(x)) continue;
            bool free = true;
            for (const auto &p : out) free = free && !z.dot(p.first);
            if (free) partners.push_back(c);
        }
        if (partners.empty()) continue;
        out.emplace_back(x, zpool[partners[rng() % partners.size()]]);
        xspan.insert(x);
    }
    return out;
}

std::optional<CssCode> random_symplectic_basis(const CssCode &code, const std::vector<BitVec> &xpool,
                                               const std::vector<BitVec> &zpool, std::mt19937_64 &rng,
                                               const std::vector<std::pair<BitVec, BitVec>> &fixed) {
    auto pairs = greedy_symplectic_pairs(code, xpool, zpool, rng, fixed);
    if (pairs.size() < code.k()) return std::nullopt;
    CssCode out = code;
    for (size_t i = 0; i < pairs.size(); ++i) {
        out.logical_x[i] = PauliTerm::x_type(pairs[i].first);
        out.logical_z[i] = PauliTerm::z_type(pairs[i].second);
    }
    return out;
}

CssCode complete_symplectic_basis(const CssCode &code, const std::vector<std::pair<BitVec, BitVec>> &pairs) {
    size_t k = code.k();
    std::vector<BitVec> xs, zs;
    for (const auto &[x, z] : pairs) {
        xs.push_back(x);
        zs.push_back(z);
    }
    // Candidates: the code's own logicals, projected off every chosen pair.
    std::vector<BitVec> cx, cz;
    for (size_t i = 0; i < k; ++i) {
        cx.push_back(code.logical_x[i].xs());
        cz.push_back(code.logical_z[i].zs());
    }
    auto project = [&](size_t from) {
        for (size_t i = from; i < xs.size(); ++i) {
            for (auto &x : cx) {
                if (x.dot(zs[i])) x ^= xs[i];
            }
            for (auto &z : cz) {
                if (z.dot(xs[i])) z ^= zs[i];
            }
        }
    };
    project(0);
    while (xs.size() < k) {
        size_t from = xs.size();
        bool found = false;
        for (size_t a = 0; a < cx.size() && !found; ++a) {
            for (size_t b = 0; b < cz.size() && !found; ++b) {
                if (!cx[a].dot(cz[b])) continue;
                xs.push_back(cx[a]);
                zs.push_back(cz[b]);
                cx.erase(cx.begin() + a);
                cz.erase(cz.begin() + b);
                found = true;
            }
        }
        if (!found) throw std::logic_error("symplectic basis: pairs do not extend");
        project(from);
    }
    CssCode out = code;
    for (size_t i = 0; i < k; ++i) {
        out.logical_x[i] = PauliTerm::x_type(xs[i]);
        out.logical_z[i] = PauliTerm::z_type(zs[i]);
    }
    return out;
}

std::vector<std::string> validate(const CssCode &code) {
    std::vector<std::string> bad;
    if (code.hx.cols() != code.n || code.hz.cols() != code.n) {
        bad.push_back("shape: check matrix width differs from n");
        return bad;
    }
    if (!(code.hx * code.hz.transpose()).is_zero()) bad.push_back("CSS orthogonality: hx hz^T != 0");
    size_t k = code.n - rank(code.hx) - rank(code.hz);
    if (code.logical_x.size() != k || code.logical_z.size() != k) {
        bad.push_back("logical count: expected k = " + std::to_string(k));
        return bad;
    }
    for (size_t i = 0; i < k; ++i) {
        const auto &x = code.logical_x[i], &z = code.logical_z[i];
        if (x.num_qubits() != code.n || z.num_qubits() != code.n) {
            bad.push_back("shape: logical " + std::to_string(i) + " length");
            return bad;
        }
        if (x.zs().any()) bad.push_back("type: logical_x " + std::to_string(i) + " is not X-type");
        if (z.xs().any()) bad.push_back("type: logical_z " + std::to_string(i) + " is not Z-type");
        if (code.hz.mul(x.xs()).any()) bad.push_back("commutation: logical_x " + std::to_string(i));
        if (code.hx.mul(z.zs()).any()) bad.push_back("commutation: logical_z " + std::to_string(i));
        for (size_t j = 0; j < k; ++j) {
            if (symplectic_product(x, code.logical_z[j]) != (i == j)) {
                bad.push_back("conjugacy: pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    return bad;
}

namespace {

// Minimum weight over words in span(basis rows) whose coefficients on the
// rows [first_logical, end) are not all zero. Gray-code enumeration.
size_t min_weight_with_logical_part(const std::vector<BitVec> &basis, size_t first_logical) {
    size_t dim = basis.size();
    if (dim >= 63) throw std::invalid_argument("min weight search: dimension too large");
    BitVec cur(basis[0].size());
    uint64_t coeffs = 0;
    size_t best = SIZE_MAX;
    uint64_t logical_mask = ((uint64_t{1} << dim) - 1) & ~((uint64_t{1} << first_logical) - 1);
    for (uint64_t g = 1; g < (uint64_t{1} << dim); ++g) {
        size_t bit = std::countr_zero(g);
        cur ^= basis[bit];
        coeffs ^= uint64_t{1} << bit;
        if (coeffs & logical_mask) best = std::min(best, cur.popcount());
    }
    return best;
}

}  // namespace

std::optional<size_t> estimate_distance_bruteforce(const CssCode &code, size_t max_n) {
    if (code.n > max_n) throw std::invalid_argument("estimate_distance_bruteforce: n exceeds max_n");
    if (code.k() == 0) return std::nullopt;
    size_t best = SIZE_MAX;
    for (int type = 0; type < 2; ++type) {
        const BitMatrix &stab = type == 0 ? code.hx : code.hz;
        RrefResult rr = rref(stab);
        std::vector<BitVec> basis;
        for (size_t r = 0; r < rr.rank; ++r) basis.push_back(rr.reduced.row(r));
        size_t first = basis.size();
        for (size_t i = 0; i < code.k(); ++i) {
            basis.push_back(type == 0 ? code.logical_x[i].xs() : code.logical_z[i].zs());
        }
        best = std::min(best, min_weight_with_logical_part(basis, first));
    }
    return best;
}

size_t min_coset_weight(const BitVec &rep, const BitMatrix &stabilizers) {
    RrefResult rr = rref(stabilizers);
    if (rr.rank >= 40) throw std::invalid_argument("min_coset_weight: stabilizer rank too large");
    BitVec cur = rep;
    size_t best = cur.popcount();
    for (uint64_t g = 1; g < (uint64_t{1} << rr.rank); ++g) {
        cur ^= rr.reduced.row(std::countr_zero(g));
        best = std::min(best, cur.popcount());
    }
    return best;
}

namespace {

json matrix_json(const BitMatrix &m) {
    json rows = json::array();
    for (size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (size_t c = 0; c < m.cols(); ++c) row.push_back(m.get(r, c) ? 1 : 0);
        rows.push_back(row);
    }
    return rows;
}

BitMatrix matrix_from_json(const json &j, size_t n) {
    BitMatrix m(j.size(), n);
    for (size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != n) throw std::invalid_argument("code json: row width differs from n");
        for (size_t c = 0; c < n; ++c) m.set(r, c, j[r][c].get<int>() != 0);
    }
    return m;
}

json bits_json(const BitVec &v) {
    json a = json::array();
    for (size_t i = 0; i < v.size(); ++i) a.push_back(v.get(i) ? 1 : 0);
    return a;
}

BitVec bits_from_json(const json &j, size_t n) {
    if (j.size() != n) throw std::invalid_argument("code json: bit array length differs from n");
    BitVec v(n);
    for (size_t i = 0; i < n; ++i) v.set(i, j[i].get<int>() != 0);
    return v;
}

json pauli_list_json(const std::vector<PauliTerm> &ps) {
    json a = json::array();
    for (const auto &p : ps) a.push_back({{"x_bits", bits_json(p.xs())}, {"z_bits", bits_json(p.zs())}});
    return a;
}

std::vector<PauliTerm> pauli_list_from_json(const json &j, size_t n) {
    std::vector<PauliTerm> out;
    for (const auto &e : j) out.emplace_back(bits_from_json(e.at("x_bits"), n), bits_from_json(e.at("z_bits"), n));
    return out;
}

}  // namespace

std::string code_to_json(const CssCode &code) {
    json j;
    j["n"] = code.n;
    j["hx"] = matrix_json(code.hx);
    j["hz"] = matrix_json(code.hz);
    j["logical_x"] = pauli_list_json(code.logical_x);
    j["logical_z"] = pauli_list_json(code.logical_z);
    return j.dump() + "\n";
}

CssCode code_from_json(const std::string &text) {
    json j = json::parse(text);
    CssCode code;
    code.n = j.at("n").get<size_t>();
    code.hx = matrix_from_json(j.at("hx"), code.n);
    code.hz = matrix_from_json(j.at("hz"), code.n);
    if (j.contains("logical_x") && j.contains("logical_z")) {
        code.logical_x = pauli_list_from_json(j.at("logical_x"), code.n);
        code.logical_z = pauli_list_from_json(j.at("logical_z"), code.n);
    } else {
        std::tie(code.logical_x, code.logical_z) = compute_logicals(code.hx, code.hz);
        code = reduce_weight(code);
    }
    return code;
}

}  // namespace msi
