#pragma once

// Independent checks for the transport module. Nothing here evaluates a
// quantile function: pairwise costs come from matching sorted atoms, and the
// barycenter problem restricted to a grid is solved as a linear program over
// the target weights and one coupling per group.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"

namespace fairot::oracle {

inline constexpr std::size_t kMaxAtoms = 6;
inline constexpr std::size_t kMaxGrid = 200;

// Exact discrete W2^2 between two atomic measures by the north-west corner
// rule on sorted atoms (the monotone coupling).
inline double monotone_matching_w2_squared(const std::vector<Atom>& p, const std::vector<Atom>& q) {
  auto a = p;
  auto b = q;
  auto by_value = [](const Atom& l, const Atom& r) { return l.value < r.value; };
  std::sort(a.begin(), a.end(), by_value);
  std::sort(b.begin(), b.end(), by_value);
  std::size_t i = 0, j = 0;
  double ra = a.empty() ? 0.0 : a[0].weight;
  double rb = b.empty() ? 0.0 : b[0].weight;
  double cost = 0.0;
  while (i < a.size() && j < b.size()) {
    const double flow = std::min(ra, rb);
    const double d = a[i].value - b[j].value;
    cost += flow * d * d;
    ra -= flow;
    rb -= flow;
    if (ra <= 1e-15 && i < a.size()) {
      if (++i < a.size()) ra += a[i].weight;
    }
    if (rb <= 1e-15 && j < b.size()) {
      if (++j < b.size()) rb += b[j].weight;
    }
  }
  return cost;
}

namespace detail {

// min c.x subject to A x = b, x >= 0, with b >= 0. Dense two-phase tableau
// simplex, Dantzig pricing with a switch to Bland's rule after a run of
// degenerate pivots. Sized for oracle instances only.
class DenseSimplex {
 public:
  DenseSimplex(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c)
      : rows_(a.size()), cols_(c.size()) {
    // columns: [0, cols_) structural, [cols_, cols_ + rows_) artificial, then rhs
    width_ = cols_ + rows_ + 1;
    tableau_.assign((rows_ + 1) * width_, 0.0);
    basis_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double sign = b[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < cols_; ++j) at(r, j) = sign * a[r][j];
      at(r, cols_ + r) = 1.0;
      at(r, width_ - 1) = sign * b[r];
      basis_[r] = cols_ + r;
    }
    cost_ = std::move(c);
  }

  double solve() {
    // phase one: minimize the sum of artificials
    load_objective([&](std::size_t j) { return j >= cols_ ? 1.0 : 0.0; });
    run(cols_ + rows_);
    if (-at(rows_, width_ - 1) > 1e-9) throw NumericalError("oracle LP infeasible");
    drive_out_artificials();

    load_objective([&](std::size_t j) { return j < cols_ ? cost_[j] : 0.0; });
    run(cols_);
    return -at(rows_, width_ - 1);
  }

  std::vector<double> solution() const {
    std::vector<double> x(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] < cols_) x[basis_[r]] = at(r, width_ - 1);
    return x;
  }

 private:
  static constexpr double kEps = 1e-12;

  double& at(std::size_t r, std::size_t j) { return tableau_[r * width_ + j]; }
  double at(std::size_t r, std::size_t j) const { return tableau_[r * width_ + j]; }

  template <typename CostOf>
  void load_objective(CostOf cost_of) {
    for (std::size_t j = 0; j < width_; ++j) at(rows_, j) = j + 1 < width_ ? cost_of(j) : 0.0;
    // reduced costs: subtract basic costs times their rows
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost_of(basis_[r]);
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(rows_, j) -= cb * at(r, j);
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t j = 0; j < width_; ++j) at(pr, j) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(r, j) -= f * at(pr, j);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Pivots while a column below `limit` has negative reduced cost.
  void run(std::size_t limit) {
    std::size_t degenerate_run = 0;
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      const bool bland = degenerate_run > 50;
      std::size_t enter = limit;
      double best = -kEps;
      for (std::size_t j = 0; j < limit; ++j) {
        if (at(rows_, j) < best) {
          enter = j;
          if (bland) break;
          best = at(rows_, j);
        }
      }
      if (enter == limit) return;

      std::size_t leave = rows_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double coef = at(r, enter);
        if (coef <= kEps) continue;
        const double q = at(r, width_ - 1) / coef;
        if (q < ratio - kEps || (q <= ratio + kEps && leave < rows_ && basis_[r] < basis_[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave == rows_) throw NumericalError("oracle LP unbounded");
      degenerate_run = ratio <= kEps ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    throw NumericalError("oracle LP iteration limit");
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (std::abs(at(r, j)) > 1e-9) {
          pivot(r, j);
          break;
        }
      }
      // otherwise the row is redundant and its artificial stays at zero
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_ = 0;
  std::vector<double> tableau_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
};

}  // namespace detail

// min over nu supported on candidate_grid of sum_s pi_s W2^2(mu_s, nu).
//
// Variables are gamma_s(i, j), the mass moved from atom i of mu_s to grid
// point j. Rows: each gamma_s has the atom weights of mu_s as row sums, and
// every gamma_s has the same column sums as gamma_1 (those column sums are nu).
inline double brute_force_barycenter_cost(std::span<const EmpiricalDistribution> dists,
                                          std::span<const double> weights,
                                          std::span<const double> candidate_grid) {
  if (dists.empty() || dists.size() != weights.size())
    throw InputError("oracle needs one weight per distribution");
  if (candidate_grid.empty()) throw InputError("oracle needs a nonempty candidate grid");
  if (candidate_grid.size() > kMaxGrid) throw InputError("oracle size limit");
  for (const auto& d : dists)
    if (d.size() > kMaxAtoms) throw InputError("oracle size limit");

  std::vector<double> grid(candidate_grid.begin(), candidate_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t k = dists.size();
  const std::size_t g = grid.size();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t s = 0; s < k; ++s) offset[s + 1] = offset[s] + dists[s].size() * g;
  const std::size_t n = offset[k];
  auto var = [&](std::size_t s, std::size_t i, std::size_t j) { return offset[s] + i * g + j; };

  std::vector<double> c(n, 0.0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t i = 0; i < dists[s].size(); ++i)
      for (std::size_t j = 0; j < g; ++j) {
        const double d = dists[s].value(i) - grid[j];
        c[var(s, i, j)] = weights[s] * d * d;
      }

  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t i = 0; i < dists[s].size(); ++i) {
      std::vector<double> row(n, 0.0);
      for (std::size_t j = 0; j < g; ++j) row[var(s, i, j)] = 1.0;
      a.push_back(std::move(row));
      b.push_back(dists[s].weight(i));
    }
  for (std::size_t s = 1; s < k; ++s)
    for (std::size_t j = 0; j < g; ++j) {
      std::vector<double> row(n, 0.0);
      for (std::size_t i = 0; i < dists[s].size(); ++i) row[var(s, i, j)] = 1.0;
      for (std::size_t i = 0; i < dists[0].size(); ++i) row[var(0, i, j)] = -1.0;
      a.push_back(std::move(row));
      b.push_back(0.0);
    }

  detail::DenseSimplex lp(std::move(a), std::move(b), std::move(c));
  return lp.solve();
}

}  // namespace fairot::oracle
