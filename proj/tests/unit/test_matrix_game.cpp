#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "fairmdp/matrix_game.hpp"
#include "fairmdp/rng.hpp"

using namespace fairmdp;

namespace {

// Row player's guaranteed payoff with mixed strategy x, and the column
// player's guaranteed ceiling with y.
double row_floor(const std::vector<double>& A, int m, int k, const std::vector<double>& x) {
  double best = 1e300;
  for (int c = 0; c < k; ++c) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += x[j] * A[j * k + c];
    best = std::min(best, s);
  }
  return best;
}

double col_ceiling(const std::vector<double>& A, int m, int k, const std::vector<double>& y) {
  double best = -1e300;
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += y[c] * A[j * k + c];
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

TEST(MatrixGame, MatchingPennies) {
  const std::vector<double> A = {1, -1, -1, 1};
  const auto g = solve_matrix_game(A, 2, 2);
  EXPECT_NEAR(g.value, 0.0, 1e-12);
  EXPECT_NEAR(g.row[0], 0.5, 1e-12);
  EXPECT_NEAR(g.col[0], 0.5, 1e-12);
}

TEST(MatrixGame, PureSaddle) {
  const std::vector<double> A = {3, 5, 1, 0};
  const auto g = solve_matrix_game(A, 2, 2);
  EXPECT_NEAR(g.value, 3.0, 1e-12);
  EXPECT_NEAR(g.row[0], 1.0, 1e-12);
  EXPECT_NEAR(g.col[0], 1.0, 1e-12);
}

TEST(MatrixGame, SingleCell) {
  const std::vector<double> A = {-2.5};
  const auto g = solve_matrix_game(A, 1, 1);
  EXPECT_NEAR(g.value, -2.5, 1e-12);
}

TEST(MatrixGame, RandomGamesCertifyTheirValue) {
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    const int m = 1 + rng.uniform_int(7), k = 1 + rng.uniform_int(7);
    std::vector<double> A(static_cast<std::size_t>(m) * k);
    for (auto& a : A) a = rng.uniform(-3.0, 5.0);
    const auto g = solve_matrix_game(A, m, k);
    double sx = 0.0, sy = 0.0;
    for (double x : g.row) {
      ASSERT_GE(x, -1e-12);
      sx += x;
    }
    for (double y : g.col) {
      ASSERT_GE(y, -1e-12);
      sy += y;
    }
    ASSERT_NEAR(sx, 1.0, 1e-9);
    ASSERT_NEAR(sy, 1.0, 1e-9);
    ASSERT_NEAR(row_floor(A, m, k, g.row), g.value, 1e-9);
    ASSERT_NEAR(col_ceiling(A, m, k, g.col), g.value, 1e-9);
  }
}

TEST(MatrixGame, DegenerateTiedPayoffs) {
  const std::vector<double> A = {1, 1, 1, 1, 1, 1};
  const auto g = solve_matrix_game(A, 2, 3);
  EXPECT_NEAR(g.value, 1.0, 1e-12);
}
