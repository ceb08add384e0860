#pragma once

#include <vector>

#include "fairmdp/mdp.hpp"
#include "fairmdp/rng.hpp"

namespace testing_helpers {

/// Stochastic policy with independent uniform-then-normalised rows.
inline fairmdp::NonStationaryPolicy random_policy(int S, int A, int H, fairmdp::Rng& rng) {
  std::vector<double> p(static_cast<std::size_t>(H) * S * A);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) {
      double total = 0.0;
      for (int a = 0; a < A; ++a) {
        const double x = rng.uniform() + 1e-3;
        p[(static_cast<std::size_t>(h) * S + s) * A + a] = x;
        total += x;
      }
      for (int a = 0; a < A; ++a) p[(static_cast<std::size_t>(h) * S + s) * A + a] /= total;
    }
  return fairmdp::NonStationaryPolicy(S, A, H, std::move(p));
}

/// Random deterministic policy.
inline fairmdp::NonStationaryPolicy random_deterministic(int S, int A, int H, fairmdp::Rng& rng) {
  std::vector<int> t(static_cast<std::size_t>(H) * S);
  for (auto& a : t) a = rng.uniform_int(A);
  return fairmdp::NonStationaryPolicy::deterministic(S, A, H, t);
}

/// Kernel with Dirichlet(1) rows.
inline fairmdp::TabularMDP random_kernel(int S, int A, int H, fairmdp::Rng& rng) {
  auto simplex = [&](int k) {
    std::vector<double> x(static_cast<std::size_t>(k));
    double t = 0.0;
    for (auto& v : x) {
      v = rng.gamma(1.0) + 1e-12;
      t += v;
    }
    for (auto& v : x) v /= t;
    return x;
  };
  auto rho = simplex(S);
  std::vector<double> P;
  for (int sa = 0; sa < S * A; ++sa) {
    const auto row = simplex(S);
    P.insert(P.end(), row.begin(), row.end());
  }
  return fairmdp::TabularMDP(S, A, H, rho, P);
}

}  // namespace testing_helpers
