#include "hkt/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace hkt {

namespace {
std::mutex plan_mu;  // FFTW planning is not thread-safe
}

Spectral::Spectral(int dim, int N) : d_(dim), N_(N) {
  P_ = 1;
  for (int i = 0; i < d_; ++i) P_ *= N_;
  std::vector<int> shape(d_, N_);
  auto* buf = fftw_alloc_complex(P_);
  buf_ = buf;
  fwd_ = fftw_plan_dft(d_, shape.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(d_, shape.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Spectral::~Spectral() {
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(static_cast<fftw_complex*>(buf_));
}

Spectral& Spectral::get(int dim, int N) {
  static std::map<std::pair<int, int>, std::unique_ptr<Spectral>> cache;
  std::scoped_lock lock(plan_mu);
  auto key = std::make_pair(dim, N);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::unique_ptr<Spectral>(new Spectral(dim, N))).first;
  return *it->second;
}

void Spectral::forward(Eigen::VectorXcd& io) {
  auto* buf = static_cast<fftw_complex*>(buf_);
  std::memcpy(buf, static_cast<const void*>(io.data()), sizeof(fftw_complex) * P_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(io.data()), buf, sizeof(fftw_complex) * P_);
}

void Spectral::backward(Eigen::VectorXcd& io) {
  auto* buf = static_cast<fftw_complex*>(buf_);
  std::memcpy(buf, static_cast<const void*>(io.data()), sizeof(fftw_complex) * P_);
  fftw_execute(static_cast<fftw_plan>(bwd_));
  std::memcpy(static_cast<void*>(io.data()), buf, sizeof(fftw_complex) * P_);
  io *= 1.0 / static_cast<double>(P_);
}

}  // namespace hkt
