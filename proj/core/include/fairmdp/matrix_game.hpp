#pragma once

#include <span>
#include <vector>

namespace fairmdp {

struct MatrixGameSolution {
  std::vector<double> row;  // maximizer's mixed strategy
  std::vector<double> col;  // minimizer's mixed strategy
  double value = 0.0;
};

/// Exact equilibrium of the zero-sum game where the row player maximizes
/// payoff[j*cols + k]. Dense tableau simplex with Bland's rule, so it is meant
/// for the small restricted games of the column-generation saddle solver.
MatrixGameSolution solve_matrix_game(std::span<const double> payoff, int rows, int cols);

}  // namespace fairmdp
