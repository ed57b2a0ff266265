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

#ifndef MSI_GF2_H
#define MSI_GF2_H

#include <bit>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msi {

using Word = uint64_t;
constexpr size_t kWordBits = 64;

inline size_t words_for(size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

/// Fixed-length bit vector packed into 64-bit words. Bits past `size()` in the
/// last word are always zero.
class BitVec {
   public:
    BitVec() = default;
    explicit BitVec(size_t n) : n_(n), words_(words_for(n), 0) {}

    static BitVec from_string(std::string_view bits);
    static BitVec from_indices(size_t n, std::span<const size_t> indices);

    size_t size() const { return n_; }
    size_t num_words() const { return words_.size(); }

    bool get(size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1; }
    void set(size_t i, bool v) {
        Word m = Word{1} << (i % kWordBits);
        if (v) {
            words_[i / kWordBits] |= m;
        } else {
            words_[i / kWordBits] &= ~m;
        }
    }
    void flip(size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }
    bool operator[](size_t i) const { return get(i); }

    std::span<Word> words() { return words_; }
    std::span<const Word> words() const { return words_; }

    size_t popcount() const;
    bool any() const;
    bool none() const { return !any(); }
    /// Index of the lowest set bit, or size() when empty.
    size_t first_one() const;
    std::vector<size_t> ones() const;

    /// Parity of the bitwise AND.
    bool dot(const BitVec &other) const;

    BitVec &operator^=(const BitVec &other);
    BitVec &operator&=(const BitVec &other);
    BitVec &operator|=(const BitVec &other);
    friend BitVec operator^(BitVec a, const BitVec &b) { return a ^= b; }
    friend BitVec operator&(BitVec a, const BitVec &b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec &b) { return a |= b; }

    bool operator==(const BitVec &other) const = default;
    bool operator<(const BitVec &other) const;

    std::string str() const;

   private:
    size_t n_ = 0;
    std::vector<Word> words_;
};

/// Dense GF(2) matrix, row-major with each row packed into 64-bit words.
class BitMatrix {
   public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols);

    static BitMatrix identity(size_t n);
    static BitMatrix from_rows(size_t cols, const std::vector<BitVec> &rows);
    static BitMatrix from_strings(const std::vector<std::string> &rows);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t row_words() const { return row_words_; }

    bool get(size_t r, size_t c) const {
        return (data_[r * row_words_ + c / kWordBits] >> (c % kWordBits)) & 1;
    }
    void set(size_t r, size_t c, bool v);
    void flip(size_t r, size_t c) { data_[r * row_words_ + c / kWordBits] ^= Word{1} << (c % kWordBits); }

    std::span<Word> row_span(size_t r) { return {data_.data() + r * row_words_, row_words_}; }
    std::span<const Word> row_span(size_t r) const { return {data_.data() + r * row_words_, row_words_}; }

    BitVec row(size_t r) const;
    void set_row(size_t r, const BitVec &v);
    void xor_row_into(size_t src, size_t dst);
    void swap_rows(size_t a, size_t b);
    size_t row_weight(size_t r) const;
    std::vector<size_t> row_support(size_t r) const;

    BitMatrix transpose() const;
    /// Matrix product over GF(2).
    BitMatrix operator*(const BitMatrix &rhs) const;
    /// Matrix-vector product over GF(2); |v| must equal cols().
    BitVec mul(const BitVec &v) const;

    BitMatrix vstack(const BitMatrix &below) const;
    BitMatrix hstack(const BitMatrix &right) const;
    BitMatrix kron(const BitMatrix &rhs) const;
    BitMatrix select_rows(std::span<const size_t> rows) const;
    BitMatrix permute_columns(std::span<const size_t> perm) const;

    bool is_zero() const;
    bool operator==(const BitMatrix &other) const = default;

    /// Dense text format: "rows cols" then one 0/1 row per line.
    std::string to_text() const;
    static BitMatrix from_text(std::string_view text);

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t row_words_ = 0;
    std::vector<Word> data_;
};

struct RrefResult {
    BitMatrix reduced;
    std::vector<size_t> pivots;
    size_t rank = 0;
};

/// Reduced row echelon form over GF(2). Zero rows are kept at the bottom.
RrefResult rref(const BitMatrix &m);
size_t rank(const BitMatrix &m);
/// Basis of the right null space {v : m v^T = 0}, one vector per row.
BitMatrix kernel(const BitMatrix &m);
/// Returns x with m x^T = b when consistent. Free variables are set to 0.
std::optional<BitVec> solve(const BitMatrix &m, const BitVec &b);
/// Inverse of a square matrix, or nullopt when singular.
std::optional<BitMatrix> inverse(const BitMatrix &m);

/// Incremental row space of a GF(2) matrix kept in echelon form.
class RowSpace {
   public:
    explicit RowSpace(size_t cols) : cols_(cols) {}
    /// Reduces v against the stored basis; returns the residue.
    BitVec reduce(BitVec v) const;
    bool contains(const BitVec &v) const { return reduce(v).none(); }
    /// Adds v if independent; returns whether it was added.
    bool insert(const BitVec &v);
    size_t dim() const { return basis_.size(); }
    size_t cols() const { return cols_; }

   private:
    size_t cols_;
    std::vector<BitVec> basis_;
    std::vector<size_t> pivots_;
};

/// Pauli operator i^phase * P_0 (x) ... (x) P_{n-1} where P_j is I, X, Y (x=z=1)
/// or Z.
class PauliTerm {
   public:
    PauliTerm() = default;
    explicit PauliTerm(size_t n) : xs_(n), zs_(n) {}
    PauliTerm(BitVec xs, BitVec zs, uint8_t phase = 0);

    /// Parses "+XYZ_I", "-iX_Z" etc. Identity may be written as '_' or 'I'.
    static PauliTerm from_str(std::string_view s);
    static PauliTerm x_type(const BitVec &support);
    static PauliTerm z_type(const BitVec &support);
    /// Single-qubit Pauli letter ('X', 'Y' or 'Z') at qubit q of n.
    static PauliTerm single(size_t n, size_t q, char letter);

    size_t num_qubits() const { return xs_.size(); }
    const BitVec &xs() const { return xs_; }
    const BitVec &zs() const { return zs_; }
    BitVec &xs() { return xs_; }
    BitVec &zs() { return zs_; }
    uint8_t phase() const { return phase_; }
    void set_phase(uint8_t p) { phase_ = p & 3; }
    bool is_hermitian() const { return (phase_ & 1) == 0; }
    /// +1 or -1 for Hermitian terms.
    int sign() const { return phase_ == 2 ? -1 : 1; }

    char letter(size_t q) const;
    void set_letter(size_t q, char letter);
    size_t weight() const;
    BitVec support() const { return xs_ | zs_; }
    bool is_identity() const { return xs_.none() && zs_.none(); }

    /// In-place right multiplication: *this = *this * rhs.
    PauliTerm &operator*=(const PauliTerm &rhs);
    bool operator==(const PauliTerm &other) const = default;
    bool operator<(const PauliTerm &other) const;

    std::string str() const;

   private:
    BitVec xs_;
    BitVec zs_;
    uint8_t phase_ = 0;
};

/// Symplectic form: true iff p and q anticommute. Throws on length mismatch.
bool symplectic_product(const PauliTerm &p, const PauliTerm &q);
bool anticommutes(const PauliTerm &p, const PauliTerm &q);
/// Product p*q with the phase tracked mod 4. Throws on length mismatch.
PauliTerm pauli_mul(const PauliTerm &p, const PauliTerm &q);

std::ostream &operator<<(std::ostream &out, const BitVec &v);
std::ostream &operator<<(std::ostream &out, const PauliTerm &p);

}  // namespace msi

#endif  // MSI_GF2_H
