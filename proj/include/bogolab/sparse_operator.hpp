#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bogolab/error.hpp"

namespace bogolab {

using Complex = std::complex<double>;

enum class Symmetry { General, Hermitian };

// Square sparse matrix stored as unique (row, col, value) entries sorted
// row-major. Exact zeros are dropped.
class SparseOperator {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    Complex value;
  };

  SparseOperator() = default;

  // Duplicates are summed in the order they appear. With Symmetry::Hermitian
  // the result is replaced by (A + A^dagger)/2, which is Hermitian bit for bit;
  // a diagonal with a non-zero imaginary part is rejected.
  static SparseOperator from_triplets(std::size_t dim, std::vector<Entry> triplets,
                                      Symmetry symmetry = Symmetry::General) {
    for (const Entry& e : triplets) {
      if (e.row >= dim || e.col >= dim) {
        throw ConstructionError("sparse entry (" + std::to_string(e.row) + "," +
                                std::to_string(e.col) + ") out of range for dim " +
                                std::to_string(dim));
      }
    }
    SparseOperator op;
    op.dim_ = dim;
    op.entries_ = merge(std::move(triplets));
    if (symmetry == Symmetry::Hermitian) {
      for (const Entry& e : op.entries_) {
        if (e.row == e.col && e.value.imag() != 0.0) {
          throw ConstructionError("non-real diagonal entry at " + std::to_string(e.row) +
                                  " in an operator declared Hermitian");
        }
      }
      std::vector<Entry> both = op.entries_;
      both.reserve(2 * op.entries_.size());
      for (const Entry& e : op.entries_) both.push_back({e.col, e.row, std::conj(e.value)});
      op.entries_ = merge(std::move(both));
      for (Entry& e : op.entries_) e.value *= 0.5;
      op.hermitian_ = true;
    }
    return op;
  }

  static SparseOperator identity(std::size_t dim) {
    std::vector<Entry> t;
    t.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) t.push_back({i, i, 1.0});
    return from_triplets(dim, std::move(t), Symmetry::Hermitian);
  }

  static SparseOperator diagonal(std::span<const double> values) {
    std::vector<Entry> t;
    t.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) t.push_back({i, i, values[i]});
    return from_triplets(values.size(), std::move(t), Symmetry::Hermitian);
  }

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }
  bool hermitian() const { return hermitian_; }

  bool is_real() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry& e) { return e.value.imag() == 0.0; });
  }

  // Entry-wise check, no tolerance.
  bool is_exactly_hermitian() const {
    SparseOperator adj = adjoint();
    if (adj.entries_.size() != entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const Entry& a = entries_[i];
      const Entry& b = adj.entries_[i];
      if (a.row != b.row || a.col != b.col || a.value != b.value) return false;
    }
    return true;
  }

  Complex at(std::size_t row, std::size_t col) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                               [](const Entry& e, const std::pair<std::size_t, std::size_t>& k) {
                                 return std::pair{e.row, e.col} < k;
                               });
    if (it != entries_.end() && it->row == row && it->col == col) return it->value;
    return 0.0;
  }

  double max_abs() const {
    double m = 0.0;
    for (const Entry& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
  }

  SparseOperator adjoint() const {
    std::vector<Entry> t;
    t.reserve(entries_.size());
    for (const Entry& e : entries_) t.push_back({e.col, e.row, std::conj(e.value)});
    SparseOperator op;
    op.dim_ = dim_;
    op.entries_ = merge(std::move(t));
    op.hermitian_ = hermitian_;
    return op;
  }

  std::vector<Complex> apply(std::span<const Complex> x) const {
    if (x.size() != dim_) throw PreconditionError("apply: vector size does not match operator dim");
    std::vector<Complex> y(dim_, 0.0);
    for (const Entry& e : entries_) y[e.row] += e.value * x[e.col];
    return y;
  }

  // <bra| A |ket>
  Complex matrix_element(std::span<const Complex> bra, std::span<const Complex> ket) const {
    if (bra.size() != dim_ || ket.size() != dim_) {
      throw PreconditionError("matrix_element: vector size does not match operator dim");
    }
    Complex s = 0.0;
    for (const Entry& e : entries_) s += std::conj(bra[e.row]) * e.value * ket[e.col];
    return s;
  }

  Eigen::MatrixXcd to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_),
                                                static_cast<Eigen::Index>(dim_));
    for (const Entry& e : entries_) {
      m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
    }
    return m;
  }

  // sum_i c_i A_i, summed term by term in the given order. Hermiticity is kept
  // exactly when every term is Hermitian and every coefficient real.
  static SparseOperator combine(std::initializer_list<std::pair<double, const SparseOperator*>> terms) {
    return combine(std::vector<std::pair<double, const SparseOperator*>>(terms));
  }

  static SparseOperator combine(const std::vector<std::pair<double, const SparseOperator*>>& terms) {
    if (terms.empty()) throw PreconditionError("combine: no terms");
    const std::size_t dim = terms.front().second->dim();
    std::size_t total = 0;
    bool herm = true;
    for (const auto& [c, op] : terms) {
      if (op->dim() != dim) throw PreconditionError("combine: dimension mismatch");
      total += op->nnz();
      herm = herm && op->hermitian();
    }
    std::vector<Entry> t;
    t.reserve(total);
    for (const auto& [c, op] : terms) {
      if (c == 0.0) continue;
      for (const Entry& e : op->entries_) t.push_back({e.row, e.col, c * e.value});
    }
    SparseOperator out;
    out.dim_ = dim;
    out.entries_ = merge(std::move(t));
    out.hermitian_ = herm;
    return out;
  }

  SparseOperator scaled(Complex c) const {
    SparseOperator out = *this;
    for (Entry& e : out.entries_) e.value *= c;
    out.entries_.erase(std::remove_if(out.entries_.begin(), out.entries_.end(),
                                      [](const Entry& e) { return e.value == 0.0; }),
                       out.entries_.end());
    out.hermitian_ = hermitian_ && c.imag() == 0.0;
    return out;
  }

  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim_ != b.dim_) throw PreconditionError("multiply: dimension mismatch");
    // Row offsets of b.
    std::vector<std::size_t> start(b.dim_ + 1, 0);
    for (const Entry& e : b.entries_) ++start[e.row + 1];
    for (std::size_t i = 0; i < b.dim_; ++i) start[i + 1] += start[i];
    std::vector<Entry> t;
    for (const Entry& ea : a.entries_) {
      for (std::size_t k = start[ea.col]; k < start[ea.col + 1]; ++k) {
        const Entry& eb = b.entries_[k];
        t.push_back({ea.row, eb.col, ea.value * eb.value});
      }
    }
    SparseOperator out;
    out.dim_ = a.dim_;
    out.entries_ = merge(std::move(t));
    return out;
  }

  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    return combine({{1.0, &a}, {-1.0, &b}});
  }

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    return combine({{1.0, &a}, {1.0, &b}});
  }

 private:
  static std::vector<Entry> merge(std::vector<Entry> t) {
    std::stable_sort(t.begin(), t.end(), [](const Entry& x, const Entry& y) {
      return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    std::vector<Entry> out;
    out.reserve(t.size());
    for (const Entry& e : t) {
      if (!out.empty() && out.back().row == e.row && out.back().col == e.col) {
        out.back().value += e.value;
      } else {
        out.push_back(e);
      }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Entry& e) { return e.value == 0.0; }),
              out.end());
    return out;
  }

  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
  bool hermitian_ = false;
};

inline SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  return a * b - b * a;
}

}  // namespace bogolab
