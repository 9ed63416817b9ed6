// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace vireg {

/// Engine whose stream depends only on (seed, stream). Used wherever results
/// must not depend on call order.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& gen, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& gen, const Eigen::VectorXd& lo,
                                      const Eigen::VectorXd& hi) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) v(i) = lo(i) + (hi(i) - lo(i)) * unit(gen);
  return v;
}

}  // namespace vireg
