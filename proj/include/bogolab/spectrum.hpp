#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/model.hpp"
#include "bogolab/sparse_operator.hpp"

namespace bogolab {

// Eigenpairs of one connected block of a Hermitian operator. Exactly one of
// `vectors` / `complex_vectors` is populated when eigenvectors were requested.
struct SpectralBlock {
  std::vector<std::size_t> indices;  // ascending basis ordinals
  Eigen::VectorXd energies;          // ascending
  Eigen::MatrixXd vectors;
  Eigen::MatrixXcd complex_vectors;
  bool is_complex = false;

  std::size_t size() const { return indices.size(); }
};

// Eigendecomposition H = Q diag(E) Q^dagger, stored block by block over the
// connected components of H's sparsity graph.
class Spectrum {
 public:
  std::size_t dim() const { return dim_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  bool has_vectors() const { return has_vectors_; }
  const std::string& basis_ref() const { return basis_ref_; }
  double ground_energy() const { return eigenvalues_.front(); }
  std::size_t largest_block() const {
    std::size_t m = 0;
    for (const auto& b : blocks_) m = std::max(m, b.size());
    return m;
  }

  // Block number and in-block position of every basis ordinal.
  std::vector<std::pair<std::size_t, std::size_t>> locate() const {
    std::vector<std::pair<std::size_t, std::size_t>> loc(dim_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (std::size_t i = 0; i < blocks_[b].indices.size(); ++i) loc[blocks_[b].indices[i]] = {b, i};
    }
    return loc;
  }

 private:
  friend struct SpectrumBuilder;
  std::size_t dim_ = 0;
  std::vector<double> eigenvalues_;
  std::vector<SpectralBlock> blocks_;
  bool has_vectors_ = false;
  std::string basis_ref_;
};

struct DiagonalizeOptions {
  bool vectors = true;
  std::size_t block_limit = kDefaultDimLimit;
  std::string label = "H";
  std::string basis_ref;
};

namespace detail {

// Tridiagonal QR on one dense block. Eigen is used rather than LAPACK: the
// OpenBLAS 0.3.20 kernel picked on some Xeon hosts returns wrong eigenvectors
// for blocks of a few dozen rows and up.
template <class Matrix>
bool dense_eigen(Matrix& a, Eigen::VectorXd& energies, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  energies = es.eigenvalues();
  if (vectors) {
    a = es.eigenvectors();
  } else {
    a = Matrix();
  }
  return true;
}

inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace detail

struct SpectrumBuilder {
  static Spectrum build(const SparseOperator& h, const DiagonalizeOptions& opt) {
    const std::size_t n = h.dim();
    if (n == 0) throw PreconditionError("diagonalize: empty operator '" + opt.label + "'");
    if (!h.hermitian() && !h.is_exactly_hermitian()) {
      throw PreconditionError("diagonalize: operator '" + opt.label + "' is not Hermitian");
    }

    // Connected components; each block is labelled by its smallest ordinal.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const auto& e : h.entries()) {
      if (e.row == e.col) continue;
      std::size_t a = detail::find_root(parent, e.row);
      std::size_t b = detail::find_root(parent, e.col);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> block_of(n);
    std::vector<std::size_t> root_to_block(n, static_cast<std::size_t>(-1));
    Spectrum s;
    s.dim_ = n;
    s.has_vectors_ = opt.vectors;
    s.basis_ref_ = opt.basis_ref;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = detail::find_root(parent, i);
      if (root_to_block[r] == static_cast<std::size_t>(-1)) {
        root_to_block[r] = s.blocks_.size();
        s.blocks_.emplace_back();
      }
      block_of[i] = root_to_block[r];
      s.blocks_[block_of[i]].indices.push_back(i);
    }
    std::vector<std::size_t> local(n);
    for (auto& b : s.blocks_) {
      if (b.size() > opt.block_limit) {
        throw SizeError("diagonalize: block of size " + std::to_string(b.size()) + " in '" + opt.label +
                        "' exceeds the dense limit " + std::to_string(opt.block_limit));
      }
      for (std::size_t i = 0; i < b.size(); ++i) local[b.indices[i]] = i;
    }

    const bool real = h.is_real();
    std::vector<Eigen::MatrixXd> dense_real;
    std::vector<Eigen::MatrixXcd> dense_complex;
    if (real) {
      dense_real.reserve(s.blocks_.size());
      for (const auto& b : s.blocks_) {
        const auto m = static_cast<Eigen::Index>(b.size());
        dense_real.emplace_back(Eigen::MatrixXd::Zero(m, m));
      }
    } else {
      dense_complex.reserve(s.blocks_.size());
      for (const auto& b : s.blocks_) {
        const auto m = static_cast<Eigen::Index>(b.size());
        dense_complex.emplace_back(Eigen::MatrixXcd::Zero(m, m));
      }
    }
    for (const auto& e : h.entries()) {
      const std::size_t bi = block_of[e.row];
      const auto r = static_cast<Eigen::Index>(local[e.row]);
      const auto c = static_cast<Eigen::Index>(local[e.col]);
      if (real) {
        dense_real[bi](r, c) = e.value.real();
      } else {
        dense_complex[bi](r, c) = e.value;
      }
    }

    std::size_t total = 0;
    for (std::size_t bi = 0; bi < s.blocks_.size(); ++bi) {
      SpectralBlock& b = s.blocks_[bi];
      bool ok = true;
      if (real) {
        Eigen::MatrixXd& a = dense_real[bi];
        ok = detail::dense_eigen(a, b.energies, opt.vectors);
        if (opt.vectors) b.vectors = std::move(a);
        a = Eigen::MatrixXd();
      } else {
        Eigen::MatrixXcd& a = dense_complex[bi];
        b.is_complex = true;
        ok = detail::dense_eigen(a, b.energies, opt.vectors);
        if (opt.vectors) b.complex_vectors = std::move(a);
        a = Eigen::MatrixXcd();
      }
      if (!ok) {
        throw SolverError("eigensolver did not converge on block " + std::to_string(bi) + " of '" + opt.label + "'");
      }
      total += b.size();
    }
    s.eigenvalues_.reserve(total);
    for (const auto& b : s.blocks_) {
      for (Eigen::Index i = 0; i < b.energies.size(); ++i) s.eigenvalues_.push_back(b.energies(i));
    }
    std::sort(s.eigenvalues_.begin(), s.eigenvalues_.end());
    return s;
  }
};

// Dense eigendecomposition of a Hermitian sparse operator, one dense solve per
// connected block. Blocks larger than options.block_limit are rejected.
inline Spectrum diagonalize(const SparseOperator& h, const DiagonalizeOptions& options = {}) {
  return SpectrumBuilder::build(h, options);
}

// max |H - Q diag(E) Q^dagger| over all entries.
inline double reconstruction_residual(const SparseOperator& h, const Spectrum& s) {
  if (!s.has_vectors()) throw PreconditionError("reconstruction_residual needs eigenvectors");
  const auto loc = s.locate();
  std::vector<Eigen::MatrixXcd> recon;
  recon.reserve(s.blocks().size());
  for (const auto& b : s.blocks()) {
    Eigen::MatrixXcd q = b.is_complex ? b.complex_vectors : b.vectors.cast<Complex>();
    recon.push_back(q * b.energies.cast<Complex>().asDiagonal() * q.adjoint());
  }
  double worst = 0.0;
  for (const auto& e : h.entries()) {
    const auto [br, lr] = loc[e.row];
    const auto [bc, lc] = loc[e.col];
    if (br != bc) {
      worst = std::max(worst, std::abs(e.value));
      continue;
    }
    Complex& slot = recon[br](static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
    slot -= e.value;
  }
  for (const auto& m : recon) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  return worst;
}

// max |Q^dagger Q - I|.
inline double orthonormality_residual(const Spectrum& s) {
  if (!s.has_vectors()) throw PreconditionError("orthonormality_residual needs eigenvectors");
  double worst = 0.0;
  for (const auto& b : s.blocks()) {
    const auto m = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd q = b.is_complex ? b.complex_vectors : b.vectors.cast<Complex>();
    worst = std::max(worst, (q.adjoint() * q - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace bogolab
