#pragma once

// Brute-force reference computations used by the tests. Nothing here calls
// the library's planners or evaluators; only the plain data types are shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "fairmdp/mdp.hpp"
#include "fairmdp/welfare.hpp"

namespace oracle {

using fairmdp::NonStationaryPolicy;
using fairmdp::RewardSet;
using fairmdp::TabularMDP;

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// All A^(S*H) deterministic non-stationary policies, as action tables
/// actions[h*S + s].
inline std::vector<std::vector<int>> deterministic_tables(int S, int A, int H) {
  const int cells = S * H;
  const std::int64_t count = ipow(A, cells);
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t code = 0; code < count; ++code) {
    std::vector<int> t(static_cast<std::size_t>(cells));
    std::int64_t c = code;
    for (int k = 0; k < cells; ++k) {
      t[static_cast<std::size_t>(k)] = static_cast<int>(c % A);
      c /= A;
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline NonStationaryPolicy table_policy(int S, int A, int H, const std::vector<int>& t) {
  std::vector<double> p(static_cast<std::size_t>(H) * S * A, 0.0);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s) p[(static_cast<std::size_t>(h) * S + s) * A + t[h * S + s]] = 1.0;
  return NonStationaryPolicy(S, A, H, std::move(p));
}

/// Per-agent values by summing over every (state, action) path with its
/// probability.
inline std::vector<double> path_values(const TabularMDP& mdp, const RewardSet& r,
                                       const NonStationaryPolicy& pi) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  const int n = r.num_agents();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  std::function<void(int, int, double)> walk = [&](int h, int s, double prob) {
    for (int a = 0; a < A; ++a) {
      const double pa = prob * pi(h, s, a);
      if (pa == 0.0) continue;
      for (int i = 0; i < n; ++i) acc[i] += r(i, s, a);
      if (h + 1 == H) {
        for (int i = 0; i < n; ++i) out[i] += pa * acc[i];
      } else {
        for (int s2 = 0; s2 < S; ++s2) {
          const double p = mdp.transition(s, a, s2);
          if (p > 0.0) walk(h + 1, s2, pa * p);
        }
      }
      for (int i = 0; i < n; ++i) acc[i] -= r(i, s, a);
    }
  };
  for (int s = 0; s < S; ++s)
    if (mdp.initial(s) > 0.0) walk(0, s, mdp.initial(s));
  return out;
}

/// Path-probability visitation q_h(s,a), same layout as OccupancyMeasure.
inline std::vector<double> path_occupancy(const TabularMDP& mdp, const NonStationaryPolicy& pi) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  std::vector<double> q(static_cast<std::size_t>(H) * S * A, 0.0);
  std::function<void(int, int, double)> walk = [&](int h, int s, double prob) {
    for (int a = 0; a < A; ++a) {
      const double pa = prob * pi(h, s, a);
      if (pa == 0.0) continue;
      q[(static_cast<std::size_t>(h) * S + s) * A + a] += pa;
      if (h + 1 < H)
        for (int s2 = 0; s2 < S; ++s2)
          if (mdp.transition(s, a, s2) > 0.0) walk(h + 1, s2, pa * mdp.transition(s, a, s2));
    }
  };
  for (int s = 0; s < S; ++s)
    if (mdp.initial(s) > 0.0) walk(0, s, mdp.initial(s));
  return q;
}

inline std::vector<std::vector<double>> deterministic_value_vectors(const TabularMDP& mdp,
                                                                   const RewardSet& r) {
  std::vector<std::vector<double>> out;
  for (const auto& t : deterministic_tables(mdp.num_states(), mdp.num_actions(), mdp.horizon()))
    out.push_back(path_values(mdp, r, table_policy(mdp.num_states(), mdp.num_actions(),
                                                   mdp.horizon(), t)));
  return out;
}

/// Drops duplicates and vectors weakly dominated by another one.
inline std::vector<std::vector<double>> pareto_front(std::vector<std::vector<double>> v) {
  std::vector<std::vector<double>> out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    bool dominated = false;
    for (std::size_t k = 0; k < v.size() && !dominated; ++k) {
      if (k == j) continue;
      bool ge = true, gt = false;
      for (std::size_t i = 0; i < v[j].size(); ++i) {
        if (v[k][i] < v[j][i]) ge = false;
        if (v[k][i] > v[j][i]) gt = true;
      }
      dominated = ge && (gt || k < j);
    }
    if (!dominated) out.push_back(v[j]);
  }
  return out;
}

/// Direct welfare formulas, independent of the library.
inline double welfare(fairmdp::Measure m, const std::vector<double>& w, std::vector<double> v) {
  switch (m) {
    case fairmdp::Measure::Nash: {
      double p = 1.0;
      for (double x : v) p *= x;
      return p;
    }
    case fairmdp::Measure::Min:
      return *std::min_element(v.begin(), v.end());
    case fairmdp::Measure::Gini: {
      std::sort(v.begin(), v.end());
      double s = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) s += w[j] * v[j];
      return s;
    }
    case fairmdp::Measure::Utilitarian:
      return std::accumulate(v.begin(), v.end(), 0.0);
  }
  return 0.0;
}

/// Best welfare over every vertex and every pairwise mixture of vertices on
/// an alpha grid of the given step. Exact up to the grid for two agents,
/// whose optimum lies on an edge of the achievable value polygon.
inline double pairwise_grid_max(fairmdp::Measure m, const std::vector<double>& w,
                                const std::vector<std::vector<double>>& vecs, double step) {
  double best = -std::numeric_limits<double>::infinity();
  const int K = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> mix;
  for (std::size_t j = 0; j < vecs.size(); ++j) {
    best = std::max(best, welfare(m, w, vecs[j]));
    for (std::size_t k = j + 1; k < vecs.size(); ++k) {
      for (int g = 1; g < K; ++g) {
        const double a = static_cast<double>(g) / K;
        mix.resize(vecs[j].size());
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * vecs[j][i] + (1 - a) * vecs[k][i];
        best = std::max(best, welfare(m, w, mix));
      }
    }
  }
  return best;
}

/// Best optimistic value of a stationary reward table r[s*A+a] on an L1 ball of
/// the given radius around phat (rows phat[(s*A+a)*S+s']), with kernel rows
/// searched over a simplex grid of resolution `step`. Three states only.
inline double discretized_optimistic_value(int A, int H, const std::vector<double>& rho,
                                           const std::vector<double>& phat, double radius,
                                           const std::vector<double>& r, double step) {
  constexpr int S = 3;
  const int K = static_cast<int>(std::lround(1.0 / step));
  std::vector<std::array<double, 3>> grid;
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j)
      grid.push_back({static_cast<double>(i) / K, static_cast<double>(j) / K,
                      static_cast<double>(K - i - j) / K});
  std::vector<double> V(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    std::vector<double> nv(S, -std::numeric_limits<double>::infinity());
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double cont = 0.0;
        if (h + 1 < H) {
          cont = -std::numeric_limits<double>::infinity();
          const double* row = &phat[(static_cast<std::size_t>(s) * A + a) * S];
          for (const auto& p : grid) {
            const double dist = std::abs(p[0] - row[0]) + std::abs(p[1] - row[1]) +
                                std::abs(p[2] - row[2]);
            if (dist > radius + 1e-12) continue;
            cont = std::max(cont, p[0] * V[0] + p[1] * V[1] + p[2] * V[2]);
          }
        }
        nv[s] = std::max(nv[s], r[static_cast<std::size_t>(s) * A + a] + cont);
      }
    }
    V = nv;
  }
  double v = 0.0;
  for (int s = 0; s < S; ++s) v += rho[s] * V[s];
  return v;
}

}  // namespace oracle
