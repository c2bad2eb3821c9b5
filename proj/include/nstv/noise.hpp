#pragma once

#include <random>

#include "nstv/core.hpp"

namespace nstv {

template <class Scalar>
struct NoisyData {
  BoundaryData<Scalar> data;
  Scalar eps_norm = 0;          // ||eps|| in L2(E), the Morozov input
  Scalar ratio_clean = 0;       // ||eps|| / ||d_clean||
  Scalar ratio_noisy = 0;       // ||eps|| / ||d_noisy||
};

/// Additive white Gaussian noise scaled so that ||eps|| / ||d_clean|| equals
/// the requested level exactly; deterministic in the seed.
template <class Scalar>
NoisyData<Scalar> add_noise(const BoundaryData<Scalar>& d, Scalar level, std::uint64_t seed) {
  if (level < 0) throw std::invalid_argument("add_noise: level must be nonnegative");
  NoisyData<Scalar> out;
  out.data = d;
  if (level == 0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector<Scalar> eps(d.values.size());
  for (int i = 0; i < eps.size(); ++i) eps[i] = Scalar(gauss(rng));
  const Scalar target = level * norm_data(d.grid, d.values);
  eps *= target / norm_data(d.grid, eps);

  out.data.values += eps;
  out.eps_norm = norm_data(d.grid, eps);
  out.ratio_clean = out.eps_norm / norm_data(d.grid, d.values);
  out.ratio_noisy = out.eps_norm / norm_data(d.grid, out.data.values);
  return out;
}

}  // namespace nstv
