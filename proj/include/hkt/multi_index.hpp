#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace hkt {

/// Multi-index bookkeeping for the exterior algebra over a frame of F <= 24
/// covectors. A basis k-form is a bitmask with k bits set; bases are ordered
/// lexicographically by the increasing index tuple, which fixes the
/// coefficient layout everywhere (including the snapshot file format).
class IndexTables {
 public:
  explicit IndexTables(int frame_size);

  int frame_size() const { return F_; }
  int dim(int degree) const { return static_cast<int>(bases_[degree].size()); }
  const std::vector<uint32_t>& masks(int degree) const { return bases_[degree]; }
  uint32_t mask_of(int degree, int rank) const { return bases_[degree][rank]; }
  int rank_of(uint32_t mask) const { return rank_[mask]; }
  static int degree_of(uint32_t mask) { return std::popcount(mask); }

  /// Sign of merging two disjoint sorted index sets: the parity of the shuffle
  /// bringing the concatenation a,b into increasing order.
  static int merge_sign(uint32_t a, uint32_t b) {
    int inv = 0;
    uint32_t bb = b;
    while (bb) {
      int j = std::countr_zero(bb);
      bb &= bb - 1;
      inv += std::popcount(a >> (j + 1));
    }
    return (inv & 1) ? -1 : 1;
  }

  /// Frame convention: even frame index 2c is the holomorphic covector dz_c,
  /// odd 2c+1 is its conjugate. Returns (p,q) of a basis mask.
  static std::pair<int, int> bidegree_of(uint32_t mask) {
    constexpr uint32_t even = 0x55555555u;
    int p = std::popcount(mask & even);
    int q = std::popcount(mask & ~even & ((1u << 24) - 1));
    return {p, q};
  }

  /// Ranks (within degree p+q) of the (p,q)-block, in lexicographic order.
  std::vector<int> block_ranks(int p, int q) const;

 private:
  int F_;
  std::vector<std::vector<uint32_t>> bases_;  // per degree
  std::vector<int> rank_;                     // mask -> rank within its degree
};

}  // namespace hkt
