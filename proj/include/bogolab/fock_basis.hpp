#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bogolab/error.hpp"
#include "bogolab/model.hpp"

namespace bogolab {

enum class Subspace { Full, Fprime };

inline const char* to_string(Subspace s) { return s == Subspace::Full ? "Full" : "Fprime"; }

using Occupation = std::uint16_t;

// Occupation-number basis over the L momentum modes with a per-mode cap.
//
// States are ordered lexicographically in (n_0, ..., n_{L-1}), which makes the
// ordinal a mixed-radix number with base n_cap + 1 and n_0 most significant.
// In the Fprime subspace n_0 is pinned to zero, so an Fprime ordinal is also the
// Full ordinal of the same state.
class FockBasis {
 public:
  static FockBasis build(const LatticeModelSpec& spec, Subspace subspace,
                         std::size_t dim_limit = kDefaultDimLimit) {
    spec.validate();
    const std::size_t base = static_cast<std::size_t>(spec.n_cap) + 1;
    std::size_t full_dim = 1;
    for (int j = 0; j < spec.L; ++j) {
      if (full_dim > std::numeric_limits<std::size_t>::max() / base || full_dim * base > dim_limit) {
        throw SizeError("basis dimension (n_cap+1)^L = " + std::to_string(base) + "^" +
                        std::to_string(spec.L) + " exceeds the dimension limit " +
                        std::to_string(dim_limit));
      }
      full_dim *= base;
    }

    FockBasis b;
    b.L_ = spec.L;
    b.n_cap_ = spec.n_cap;
    b.subspace_ = subspace;
    b.dim_ = subspace == Subspace::Full ? full_dim : full_dim / base;
    b.occupations_.resize(b.dim_ * static_cast<std::size_t>(b.L_));

    const int first = subspace == Subspace::Full ? 0 : 1;
    std::vector<Occupation> cur(static_cast<std::size_t>(b.L_), 0);
    for (std::size_t i = 0; i < b.dim_; ++i) {
      std::copy(cur.begin(), cur.end(), b.occupations_.begin() + static_cast<std::ptrdiff_t>(i * b.L_));
      // Odometer increment, last mode fastest.
      for (int j = b.L_ - 1; j >= first; --j) {
        if (cur[static_cast<std::size_t>(j)] < b.n_cap_) {
          ++cur[static_cast<std::size_t>(j)];
          break;
        }
        cur[static_cast<std::size_t>(j)] = 0;
      }
    }
    return b;
  }

  int num_modes() const { return L_; }
  int n_cap() const { return n_cap_; }
  Subspace subspace() const { return subspace_; }
  std::size_t dim() const { return dim_; }
  std::size_t radix() const { return static_cast<std::size_t>(n_cap_) + 1; }

  std::span<const Occupation> state(std::size_t i) const {
    return {occupations_.data() + i * static_cast<std::size_t>(L_), static_cast<std::size_t>(L_)};
  }

  int occupation(std::size_t i, int mode) const {
    return occupations_[i * static_cast<std::size_t>(L_) + static_cast<std::size_t>(mode)];
  }

  int total_particles(std::size_t i) const {
    int n = 0;
    for (Occupation o : state(i)) n += o;
    return n;
  }

  // Ordinal of an occupation vector, or nullopt if it is not in this basis.
  std::optional<std::size_t> index_of(std::span<const Occupation> occ) const {
    if (occ.size() != static_cast<std::size_t>(L_)) return std::nullopt;
    if (subspace_ == Subspace::Fprime && occ[0] != 0) return std::nullopt;
    std::size_t idx = 0;
    for (Occupation o : occ) {
      if (o > n_cap_) return std::nullopt;
      idx = idx * radix() + o;
    }
    return idx;
  }

  // Full-basis ordinal of the product state (n_0 = n0) x (Fprime state j).
  std::size_t full_index(std::size_t fprime_index, int n0) const {
    std::size_t stride = 1;
    for (int j = 1; j < L_; ++j) stride *= radix();
    return static_cast<std::size_t>(n0) * stride + fprime_index;
  }

  bool same_shape(const FockBasis& other) const {
    return L_ == other.L_ && n_cap_ == other.n_cap_;
  }

  std::string id() const {
    return std::string(to_string(subspace_)) + "(L=" + std::to_string(L_) +
           ",n_cap=" + std::to_string(n_cap_) + ")";
  }

 private:
  FockBasis() = default;

  int L_ = 0;
  int n_cap_ = 0;
  Subspace subspace_ = Subspace::Full;
  std::size_t dim_ = 0;
  std::vector<Occupation> occupations_;
};

inline FockBasis build_basis(const LatticeModelSpec& spec, Subspace subspace,
                             std::size_t dim_limit = kDefaultDimLimit) {
  return FockBasis::build(spec, subspace, dim_limit);
}

}  // namespace bogolab
