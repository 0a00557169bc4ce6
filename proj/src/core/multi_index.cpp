#include "hkt/multi_index.hpp"

#include <stdexcept>

namespace hkt {

namespace {

void gen(int F, int k, int start, uint32_t acc, std::vector<uint32_t>& out) {
  if (k == 0) {
    out.push_back(acc);
    return;
  }
  for (int i = start; i <= F - k; ++i)
    gen(F, k - 1, i + 1, acc | (1u << i), out);
}

}  // namespace

IndexTables::IndexTables(int frame_size) : F_(frame_size) {
  if (F_ < 1 || F_ > 24) throw std::invalid_argument("IndexTables: frame size out of range");
  bases_.resize(F_ + 1);
  rank_.assign(1u << F_, -1);
  for (int k = 0; k <= F_; ++k) {
    gen(F_, k, 0, 0u, bases_[k]);
    for (int r = 0; r < static_cast<int>(bases_[k].size()); ++r)
      rank_[bases_[k][r]] = r;
  }
}

std::vector<int> IndexTables::block_ranks(int p, int q) const {
  std::vector<int> out;
  const int k = p + q;
  if (k < 0 || k > F_) return out;
  for (int r = 0; r < dim(k); ++r) {
    auto [pp, qq] = bidegree_of(bases_[k][r]);
    if (pp == p && qq == q) out.push_back(r);
  }
  return out;
}

}  // namespace hkt
