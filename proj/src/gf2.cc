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

#include "msi/gf2.h"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace msi {

// ---------------------------------------------------------------- BitVec

BitVec BitVec::from_string(std::string_view bits) {
    BitVec v(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i, true);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("BitVec::from_string: expected 0/1");
        }
    }
    return v;
}

BitVec BitVec::from_indices(size_t n, std::span<const size_t> indices) {
    BitVec v(n);
    for (size_t i : indices) {
        if (i >= n) throw std::out_of_range("BitVec::from_indices");
        v.set(i, true);
    }
    return v;
}

size_t BitVec::popcount() const {
    size_t c = 0;
    for (Word w : words_) c += std::popcount(w);
    return c;
}

bool BitVec::any() const {
    for (Word w : words_) {
        if (w) return true;
    }
    return false;
}

size_t BitVec::first_one() const {
    for (size_t k = 0; k < words_.size(); ++k) {
        if (words_[k]) return k * kWordBits + std::countr_zero(words_[k]);
    }
    return n_;
}

std::vector<size_t> BitVec::ones() const {
    std::vector<size_t> out;
    for (size_t k = 0; k < words_.size(); ++k) {
        Word w = words_[k];
        while (w) {
            out.push_back(k * kWordBits + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

bool BitVec::dot(const BitVec &other) const {
    if (other.n_ != n_) throw std::invalid_argument("BitVec::dot: length mismatch");
    Word acc = 0;
    for (size_t k = 0; k < words_.size(); ++k) acc ^= words_[k] & other.words_[k];
    return std::popcount(acc) & 1;
}

BitVec &BitVec::operator^=(const BitVec &other) {
    if (other.n_ != n_) throw std::invalid_argument("BitVec::operator^=: length mismatch");
    for (size_t k = 0; k < words_.size(); ++k) words_[k] ^= other.words_[k];
    return *this;
}

BitVec &BitVec::operator&=(const BitVec &other) {
    if (other.n_ != n_) throw std::invalid_argument("BitVec::operator&=: length mismatch");
    for (size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
    return *this;
}

BitVec &BitVec::operator|=(const BitVec &other) {
    if (other.n_ != n_) throw std::invalid_argument("BitVec::operator|=: length mismatch");
    for (size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
}

bool BitVec::operator<(const BitVec &other) const {
    if (n_ != other.n_) return n_ < other.n_;
    // Lexicographic on bit index 0 first.
    for (size_t k = 0; k < words_.size(); ++k) {
        Word d = words_[k] ^ other.words_[k];
        if (d) {
            Word low = d & (~d + 1);
            return (other.words_[k] & low) != 0;
        }
    }
    return false;
}

std::string BitVec::str() const {
    std::string s(n_, '0');
    for (size_t i = 0; i < n_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

std::ostream &operator<<(std::ostream &out, const BitVec &v) { return out << v.str(); }

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), row_words_(words_for(cols)), data_(rows * words_for(cols), 0) {}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(size_t cols, const std::vector<BitVec> &rows) {
    BitMatrix m(rows.size(), cols);
    for (size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
    return m;
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string> &rows) {
    size_t cols = rows.empty() ? 0 : rows[0].size();
    std::vector<BitVec> vs;
    for (const auto &s : rows) {
        if (s.size() != cols) throw std::invalid_argument("BitMatrix::from_strings: ragged rows");
        vs.push_back(BitVec::from_string(s));
    }
    return from_rows(cols, vs);
}

void BitMatrix::set(size_t r, size_t c, bool v) {
    Word &w = data_[r * row_words_ + c / kWordBits];
    Word m = Word{1} << (c % kWordBits);
    w = v ? (w | m) : (w & ~m);
}

BitVec BitMatrix::row(size_t r) const {
    BitVec v(cols_);
    auto src = row_span(r);
    std::copy(src.begin(), src.end(), v.words().begin());
    return v;
}

void BitMatrix::set_row(size_t r, const BitVec &v) {
    if (v.size() != cols_) throw std::invalid_argument("BitMatrix::set_row: length mismatch");
    auto src = v.words();
    std::copy(src.begin(), src.end(), row_span(r).begin());
}

void BitMatrix::xor_row_into(size_t src, size_t dst) {
    Word *d = data_.data() + dst * row_words_;
    const Word *s = data_.data() + src * row_words_;
    for (size_t k = 0; k < row_words_; ++k) d[k] ^= s[k];
}

void BitMatrix::swap_rows(size_t a, size_t b) {
    if (a == b) return;
    std::swap_ranges(data_.begin() + a * row_words_, data_.begin() + (a + 1) * row_words_,
                     data_.begin() + b * row_words_);
}

size_t BitMatrix::row_weight(size_t r) const {
    size_t c = 0;
    for (Word w : row_span(r)) c += std::popcount(w);
    return c;
}

std::vector<size_t> BitMatrix::row_support(size_t r) const { return row(r).ones(); }

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; ++r) {
        auto span = row_span(r);
        for (size_t k = 0; k < row_words_; ++k) {
            Word w = span[k];
            while (w) {
                size_t c = k * kWordBits + std::countr_zero(w);
                t.set(c, r, true);
                w &= w - 1;
            }
        }
    }
    return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix &rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("BitMatrix::operator*: shape mismatch");
    BitMatrix out(rows_, rhs.cols_);
    for (size_t r = 0; r < rows_; ++r) {
        auto dst = out.row_span(r);
        for (size_t c : row_support(r)) {
            auto src = rhs.row_span(c);
            for (size_t k = 0; k < dst.size(); ++k) dst[k] ^= src[k];
        }
    }
    return out;
}

BitVec BitMatrix::mul(const BitVec &v) const {
    if (v.size() != cols_) throw std::invalid_argument("BitMatrix::mul: length mismatch");
    BitVec out(rows_);
    auto vw = v.words();
    for (size_t r = 0; r < rows_; ++r) {
        Word acc = 0;
        auto span = row_span(r);
        for (size_t k = 0; k < row_words_; ++k) acc ^= span[k] & vw[k];
        if (std::popcount(acc) & 1) out.set(r, true);
    }
    return out;
}

BitMatrix BitMatrix::vstack(const BitMatrix &below) const {
    if (rows_ == 0) return below;
    if (below.rows_ == 0) return *this;
    if (below.cols_ != cols_) throw std::invalid_argument("BitMatrix::vstack: column mismatch");
    BitMatrix out(rows_ + below.rows_, cols_);
    std::copy(data_.begin(), data_.end(), out.data_.begin());
    std::copy(below.data_.begin(), below.data_.end(), out.data_.begin() + data_.size());
    return out;
}

BitMatrix BitMatrix::hstack(const BitMatrix &right) const {
    if (right.rows_ != rows_) throw std::invalid_argument("BitMatrix::hstack: row mismatch");
    BitMatrix out(rows_, cols_ + right.cols_);
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c) {
            if (get(r, c)) out.set(r, c, true);
        }
        for (size_t c = 0; c < right.cols_; ++c) {
            if (right.get(r, c)) out.set(r, cols_ + c, true);
        }
    }
    return out;
}

BitMatrix BitMatrix::kron(const BitMatrix &rhs) const {
    BitMatrix out(rows_ * rhs.rows_, cols_ * rhs.cols_);
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c) {
            if (!get(r, c)) continue;
            for (size_t r2 = 0; r2 < rhs.rows_; ++r2) {
                for (size_t c2 = 0; c2 < rhs.cols_; ++c2) {
                    if (rhs.get(r2, c2)) out.set(r * rhs.rows_ + r2, c * rhs.cols_ + c2, true);
                }
            }
        }
    }
    return out;
}

BitMatrix BitMatrix::select_rows(std::span<const size_t> rows) const {
    BitMatrix out(rows.size(), cols_);
    for (size_t i = 0; i < rows.size(); ++i) {
        auto src = row_span(rows[i]);
        std::copy(src.begin(), src.end(), out.row_span(i).begin());
    }
    return out;
}

BitMatrix BitMatrix::permute_columns(std::span<const size_t> perm) const {
    // Column c of the result is column perm[c] of this matrix.
    BitMatrix out(rows_, perm.size());
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < perm.size(); ++c) {
            if (get(r, perm[c])) out.set(r, c, true);
        }
    }
    return out;
}

bool BitMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](Word w) { return w == 0; });
}

std::string BitMatrix::to_text() const {
    std::string s = std::to_string(rows_) + " " + std::to_string(cols_) + "\n";
    s.reserve(s.size() + rows_ * (cols_ + 1));
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c) s.push_back(get(r, c) ? '1' : '0');
        s.push_back('\n');
    }
    return s;
}

BitMatrix BitMatrix::from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw std::invalid_argument("BitMatrix::from_text: missing header");
    BitMatrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        std::string line;
        if (!(in >> line) || line.size() != cols) {
            throw std::invalid_argument("BitMatrix::from_text: bad row " + std::to_string(r));
        }
        for (size_t c = 0; c < cols; ++c) {
            if (line[c] == '1') {
                m.set(r, c, true);
            } else if (line[c] != '0') {
                throw std::invalid_argument("BitMatrix::from_text: expected 0/1");
            }
        }
    }
    return m;
}

// ---------------------------------------------------------------- elimination

RrefResult rref(const BitMatrix &m) {
    RrefResult res{m, {}, 0};
    BitMatrix &a = res.reduced;
    size_t row = 0;
    for (size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        size_t piv = row;
        while (piv < a.rows() && !a.get(piv, col)) ++piv;
        if (piv == a.rows()) continue;
        a.swap_rows(piv, row);
        for (size_t r = 0; r < a.rows(); ++r) {
            if (r != row && a.get(r, col)) a.xor_row_into(row, r);
        }
        res.pivots.push_back(col);
        ++row;
    }
    res.rank = row;
    return res;
}

size_t rank(const BitMatrix &m) { return rref(m).rank; }

BitMatrix kernel(const BitMatrix &m) {
    RrefResult rr = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t p : rr.pivots) is_pivot[p] = true;
    std::vector<BitVec> basis;
    for (size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVec v(m.cols());
        v.set(f, true);
        for (size_t i = 0; i < rr.rank; ++i) {
            if (rr.reduced.get(i, f)) v.set(rr.pivots[i], true);
        }
        basis.push_back(std::move(v));
    }
    return BitMatrix::from_rows(m.cols(), basis);
}

std::optional<BitVec> solve(const BitMatrix &m, const BitVec &b) {
    if (b.size() != m.rows()) throw std::invalid_argument("solve: |b| != rows");
    // Eliminate on the augmented matrix [m | b].
    BitMatrix aug(m.rows(), m.cols() + 1);
    for (size_t r = 0; r < m.rows(); ++r) {
        auto src = m.row_span(r);
        auto dst = aug.row_span(r);
        std::copy(src.begin(), src.end(), dst.begin());
        if (b.get(r)) aug.set(r, m.cols(), true);
    }
    RrefResult rr = rref(aug);
    if (!rr.pivots.empty() && rr.pivots.back() == m.cols()) return std::nullopt;
    BitVec x(m.cols());
    for (size_t i = 0; i < rr.rank; ++i) {
        if (rr.reduced.get(i, m.cols())) x.set(rr.pivots[i], true);
    }
    return x;
}

std::optional<BitMatrix> inverse(const BitMatrix &m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
    size_t n = m.rows();
    RrefResult rr = rref(m.hstack(BitMatrix::identity(n)));
    if (rr.rank < n || rr.pivots[n - 1] != n - 1) return std::nullopt;
    BitMatrix inv(n, n);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < n; ++c) {
            if (rr.reduced.get(r, n + c)) inv.set(r, c, true);
        }
    }
    return inv;
}

BitVec RowSpace::reduce(BitVec v) const {
    for (size_t i = 0; i < basis_.size(); ++i) {
        if (v.get(pivots_[i])) v ^= basis_[i];
    }
    return v;
}

bool RowSpace::insert(const BitVec &v) {
    BitVec r = reduce(v);
    size_t p = r.first_one();
    if (p == r.size()) return false;
    // Keep the basis fully reduced on pivot columns.
    for (size_t i = 0; i < basis_.size(); ++i) {
        if (basis_[i].get(p)) basis_[i] ^= r;
    }
    basis_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
}

// ---------------------------------------------------------------- PauliTerm

PauliTerm::PauliTerm(BitVec xs, BitVec zs, uint8_t phase) : xs_(std::move(xs)), zs_(std::move(zs)), phase_(phase & 3) {
    if (xs_.size() != zs_.size()) throw std::invalid_argument("PauliTerm: x/z length mismatch");
}

PauliTerm PauliTerm::from_str(std::string_view s) {
    uint8_t phase = 0;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        if (s[i] == '-') phase = 2;
        ++i;
    }
    if (i < s.size() && s[i] == 'i') {
        phase = (phase + 1) & 3;
        ++i;
    }
    PauliTerm p(s.size() - i);
    for (size_t q = 0; i < s.size(); ++i, ++q) p.set_letter(q, s[i]);
    p.phase_ = phase;
    return p;
}

PauliTerm PauliTerm::x_type(const BitVec &support) { return PauliTerm(support, BitVec(support.size())); }

PauliTerm PauliTerm::z_type(const BitVec &support) { return PauliTerm(BitVec(support.size()), support); }

PauliTerm PauliTerm::single(size_t n, size_t q, char letter) {
    PauliTerm p(n);
    p.set_letter(q, letter);
    return p;
}

char PauliTerm::letter(size_t q) const {
    bool x = xs_.get(q), z = zs_.get(q);
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
}

void PauliTerm::set_letter(size_t q, char c) {
    switch (c) {
        case 'I':
        case '_':
            xs_.set(q, false), zs_.set(q, false);
            break;
        case 'X':
            xs_.set(q, true), zs_.set(q, false);
            break;
        case 'Y':
            xs_.set(q, true), zs_.set(q, true);
            break;
        case 'Z':
            xs_.set(q, false), zs_.set(q, true);
            break;
        default:
            throw std::invalid_argument(std::string("PauliTerm: bad letter ") + c);
    }
}

size_t PauliTerm::weight() const {
    size_t c = 0;
    auto x = xs_.words(), z = zs_.words();
    for (size_t k = 0; k < x.size(); ++k) c += std::popcount(x[k] | z[k]);
    return c;
}

PauliTerm &PauliTerm::operator*=(const PauliTerm &rhs) {
    if (rhs.num_qubits() != num_qubits()) throw std::invalid_argument("pauli_mul: length mismatch");
    // Per-qubit letter products contribute +-i whenever the letters anticommute;
    // cnt1/cnt2 form a 2-bit counter per lane.
    Word cnt1 = 0, cnt2 = 0;
    auto x1s = xs_.words(), z1s = zs_.words();
    auto x2s = rhs.xs_.words(), z2s = rhs.zs_.words();
    for (size_t k = 0; k < x1s.size(); ++k) {
        Word old_x1 = x1s[k], old_z1 = z1s[k];
        Word x1 = old_x1 ^ x2s[k], z1 = old_z1 ^ z2s[k];
        x1s[k] = x1;
        z1s[k] = z1;
        Word x1z2 = old_x1 & z2s[k];
        Word anti = (x2s[k] & old_z1) ^ x1z2;
        cnt2 ^= (cnt1 ^ x1 ^ z1 ^ x1z2) & anti;
        cnt1 ^= anti;
    }
    unsigned s = std::popcount(cnt1) + 2 * std::popcount(cnt2);
    phase_ = (phase_ + rhs.phase_ + s) & 3;
    return *this;
}

bool PauliTerm::operator<(const PauliTerm &other) const {
    if (xs_ != other.xs_) return xs_ < other.xs_;
    if (zs_ != other.zs_) return zs_ < other.zs_;
    return phase_ < other.phase_;
}

std::string PauliTerm::str() const {
    static const char *prefix[4] = {"+", "+i", "-", "-i"};
    std::string s = prefix[phase_];
    for (size_t q = 0; q < num_qubits(); ++q) {
        char c = letter(q);
        s.push_back(c == 'I' ? '_' : c);
    }
    return s;
}

std::ostream &operator<<(std::ostream &out, const PauliTerm &p) { return out << p.str(); }

bool symplectic_product(const PauliTerm &p, const PauliTerm &q) {
    if (p.num_qubits() != q.num_qubits()) throw std::invalid_argument("symplectic_product: length mismatch");
    Word acc = 0;
    auto px = p.xs().words(), pz = p.zs().words(), qx = q.xs().words(), qz = q.zs().words();
    for (size_t k = 0; k < px.size(); ++k) acc ^= (px[k] & qz[k]) ^ (pz[k] & qx[k]);
    return std::popcount(acc) & 1;
}

bool anticommutes(const PauliTerm &p, const PauliTerm &q) { return symplectic_product(p, q); }

PauliTerm pauli_mul(const PauliTerm &p, const PauliTerm &q) {
    PauliTerm r = p;
    r *= q;
    return r;
}

}  // namespace msi
