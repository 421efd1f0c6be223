#include "matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfbai::detail {

// Shift payoffs to B >= 1 and solve  max 1'y  s.t.  B y <= 1, y >= 0.
// The slack basis is feasible at y = 0. At the optimum z = 1'y, the game value is
// 1/z - shift and the row strategy is the constraint dual divided by z.
MatrixGame::Solution MatrixGame::solve() const {
  Solution out;
  const std::size_t m = rows_;
  const std::size_t n = columns_.size();
  if (m == 0 || n == 0) return out;

  double min_payoff = std::numeric_limits<double>::infinity();
  for (const auto& col : columns_) {
    for (double v : col) min_payoff = std::min(min_payoff, v);
  }
  const double shift = 1.0 - min_payoff;

  // Tableau: m constraint rows + objective row; n structural + m slack columns + rhs.
  const std::size_t width = n + m + 1;
  std::vector<double> tab((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * width + c]; };
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) at(i, j) = columns_[j][i] + shift;
  }
  for (std::size_t i = 0; i < m; ++i) {
    at(i, n + i) = 1.0;
    at(i, width - 1) = 1.0;
  }
  // Objective row holds reduced costs c_j - z_j; starts at c.
  for (std::size_t j = 0; j < n; ++j) at(m, j) = 1.0;

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  constexpr double kEps = 1e-12;
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  std::size_t degenerate_run = 0;
  bool bland = false;

  for (std::size_t pivot = 0;; ++pivot) {
    if (pivot > max_pivots) return out;
    std::size_t enter = width;
    double best = kEps;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      const double r = at(m, j);
      if (r > best) {
        enter = j;
        if (bland) break;
        best = r;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = at(i, enter);
      if (a <= kEps) continue;
      const double ratio = at(i, width - 1) / a;
      if (ratio < best_ratio - kEps ||
          (ratio <= best_ratio + kEps && leave < m && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    // B > 0 keeps the feasible region bounded.
    if (leave == m) return out;

    if (best_ratio <= kEps) {
      if (++degenerate_run > 2 * (n + m)) bland = true;
    } else {
      degenerate_run = 0;
    }

    const double p = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= p;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= factor * at(leave, c);
    }
    basis[leave] = enter;
  }

  // Objective row rhs holds -z.
  const double z = -at(m, width - 1);
  if (!(z > 0.0)) return out;
  out.row_strategy.assign(m, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dual = std::max(0.0, -at(m, n + i));
    out.row_strategy[i] = dual;
    total += dual;
  }
  if (!(total > 0.0)) return out;
  for (double& w : out.row_strategy) w /= total;
  out.value = 1.0 / z - shift;
  out.ok = true;
  return out;
}

}  // namespace mfbai::detail
