#include "fairmdp/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairmdp/errors.hpp"

namespace fairmdp {

MatrixGameSolution solve_matrix_game(std::span<const double> payoff, int rows, int cols) {
  if (rows <= 0 || cols <= 0 ||
      payoff.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InvalidInput("matrix game shape mismatch");
  const double lo = *std::min_element(payoff.begin(), payoff.end());
  const double hi = *std::max_element(payoff.begin(), payoff.end());
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidInput("matrix game payoff not finite");
  // Shift so every entry lies in [1, 1 + range]; the game value becomes positive.
  const double shift = lo - 1.0;

  // max 1'z  s.t.  A z <= 1, z >= 0   (z: column player, scaled)
  // Tableau columns: z_0..z_{k-1}, slack_0..slack_{m-1}, rhs.
  const int m = rows, k = cols, width = k + m + 1;
  std::vector<double> t(static_cast<std::size_t>(m + 1) * width, 0.0);
  auto at = [&](int r, int c) -> double& {
    return t[static_cast<std::size_t>(r) * width + c];
  };
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < k; ++c) at(j, c) = payoff[static_cast<std::size_t>(j) * k + c] - shift;
    at(j, k + j) = 1.0;
    at(j, width - 1) = 1.0;
  }
  for (int c = 0; c < k; ++c) at(m, c) = -1.0;
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) basis[static_cast<std::size_t>(j)] = k + j;

  const double eps = 1e-12 * std::max(1.0, hi - lo + 1.0);
  const int max_pivots = 50 * (m + k) + 1000;
  for (int pivot = 0;; ++pivot) {
    if (pivot > max_pivots) throw NonConvergence("matrix game simplex did not terminate");
    int enter = -1;
    for (int c = 0; c < k + m; ++c) {
      if (at(m, c) < -eps) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const double a = at(j, enter);
      if (a <= eps) continue;
      const double ratio = at(j, width - 1) / a;
      if (ratio < best_ratio - eps ||
          (ratio <= best_ratio + eps && leave >= 0 &&
           basis[static_cast<std::size_t>(j)] < basis[static_cast<std::size_t>(leave)])) {
        best_ratio = std::min(best_ratio, ratio);
        leave = j;
      }
    }
    // Bounded: entries are positive so every column has a positive pivot.
    if (leave < 0) throw NonConvergence("matrix game LP unbounded");
    const double p = at(leave, enter);
    for (int c = 0; c < width; ++c) at(leave, c) /= p;
    for (int r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (int c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  MatrixGameSolution out;
  out.row.assign(static_cast<std::size_t>(m), 0.0);
  out.col.assign(static_cast<std::size_t>(k), 0.0);
  double total_z = 0.0;
  for (int j = 0; j < m; ++j) {
    const int b = basis[static_cast<std::size_t>(j)];
    if (b < k) {
      const double z = std::max(0.0, at(j, width - 1));
      out.col[static_cast<std::size_t>(b)] = z;
      total_z += z;
    }
  }
  double total_u = 0.0;
  for (int j = 0; j < m; ++j) {
    const double u = std::max(0.0, at(m, k + j));
    out.row[static_cast<std::size_t>(j)] = u;
    total_u += u;
  }
  if (total_z <= 0.0 || total_u <= 0.0) throw NonConvergence("matrix game degenerate");
  for (double& x : out.col) x /= total_z;
  for (double& x : out.row) x /= total_u;
  out.value = 1.0 / total_z + shift;
  return out;
}

}  // namespace fairmdp
