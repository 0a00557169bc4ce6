#pragma once

#include <Eigen/Dense>

#include "hkt/grid.hpp"

namespace hkt {

/// Cached FFTW c2c transforms for a d-dimensional N^d grid. forward() is the
/// unnormalized DFT; backward() includes the 1/N^d factor, so the pair is an
/// identity round trip.
class Spectral {
 public:
  static Spectral& get(int dim, int N);

  void forward(Eigen::VectorXcd& io);
  void backward(Eigen::VectorXcd& io);

  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  ~Spectral();

 private:
  Spectral(int dim, int N);
  int d_, N_;
  long P_;
  void* buf_;  // fftw_complex scratch, plan-aligned
  void* fwd_;
  void* bwd_;
};

}  // namespace hkt
