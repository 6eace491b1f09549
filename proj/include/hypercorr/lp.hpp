#pragma once

#include <optional>
#include <vector>

#include "hypercorr/dyadic.hpp"

namespace hypercorr::lp {

struct LinearConstraint {
  std::vector<Rational> coeffs;
  Rational rhs;
  bool equality = false;  // false: coeffs . x >= rhs
};

/// Exact rational feasibility for { x >= 0 : constraints }, via a phase-1
/// simplex (minimize artificial mass) with Bland's rule, so termination is
/// guaranteed. Returns a feasible point or nullopt.
///
/// Scale target: a handful of variables and at most a few thousand rows;
/// everything stays mpq.
inline std::optional<std::vector<Rational>> feasible_point(
    int dim, const std::vector<LinearConstraint>& constraints) {
  const size_t m = constraints.size();
  // columns: x (dim) | surplus/slack per inequality | artificials; built below
  size_t cols = dim;
  std::vector<size_t> slack_col(m, SIZE_MAX);
  for (size_t i = 0; i < m; ++i)
    if (!constraints[i].equality) slack_col[i] = cols++;
  size_t art_begin = cols;

  // rows normalized to nonnegative rhs; slack coefficient is -1 for a kept
  // ">=" row and +1 for a flipped one
  std::vector<std::vector<Rational>> row(m);
  std::vector<Rational> rhs(m);
  std::vector<int> slack_sign(m, 0);
  for (size_t i = 0; i < m; ++i) {
    const LinearConstraint& c = constraints[i];
    if ((int)c.coeffs.size() != dim) throw_input("lp: coefficient arity mismatch");
    bool flip = c.rhs.sign() < 0;
    row[i].resize(dim);
    for (int j = 0; j < dim; ++j) row[i][j] = flip ? -c.coeffs[j] : c.coeffs[j];
    rhs[i] = flip ? -c.rhs : c.rhs;
    if (!c.equality) slack_sign[i] = flip ? 1 : -1;
  }

  // basis: flipped inequality rows start on their slack; everything else gets
  // an artificial
  std::vector<size_t> art_col(m, SIZE_MAX);
  for (size_t i = 0; i < m; ++i)
    if (slack_sign[i] != 1) art_col[i] = cols++;

  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols + 1));
  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) {
    for (int j = 0; j < dim; ++j) t[i][j] = row[i][j];
    if (slack_sign[i] != 0) t[i][slack_col[i]] = Rational(slack_sign[i]);
    t[i][cols] = rhs[i];
    if (art_col[i] != SIZE_MAX) {
      t[i][art_col[i]] = Rational(1);
      basis[i] = art_col[i];
    } else {
      basis[i] = slack_col[i];
    }
  }

  // phase-1 objective: minimize sum of artificials; reduced-cost row
  std::vector<Rational> z(cols + 1);
  for (size_t j = art_begin; j < cols; ++j) z[j] = Rational(1);
  for (size_t i = 0; i < m; ++i)
    if (art_col[i] != SIZE_MAX)
      for (size_t j = 0; j <= cols; ++j) z[j] -= t[i][j];

  auto pivot = [&](size_t pr, size_t pc) {
    Rational inv = Rational(1) / t[pr][pc];
    for (size_t j = 0; j <= cols; ++j) t[pr][j] *= inv;
    for (size_t i = 0; i < m; ++i) {
      if (i == pr || t[i][pc].is_zero()) continue;
      Rational f = t[i][pc];
      for (size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[pr][j];
    }
    if (!z[pc].is_zero()) {
      Rational f = z[pc];
      for (size_t j = 0; j <= cols; ++j) z[j] -= f * t[pr][j];
    }
    basis[pr] = pc;
  };

  while (true) {
    size_t enter = SIZE_MAX;
    for (size_t j = 0; j < cols; ++j)
      if (z[j].sign() < 0) {  // Bland: smallest improving index
        enter = j;
        break;
      }
    if (enter == SIZE_MAX) break;
    size_t leave = SIZE_MAX;
    Rational best;
    for (size_t i = 0; i < m; ++i) {
      if (t[i][enter].sign() <= 0) continue;
      Rational ratio = t[i][cols] / t[i][enter];
      if (leave == SIZE_MAX || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == SIZE_MAX) return std::nullopt;  // phase-1 column with no positive entry
    pivot(leave, enter);
  }

  if (!(-z[cols]).is_zero()) return std::nullopt;  // artificial mass remains

  std::vector<Rational> x(dim);
  for (size_t i = 0; i < m; ++i)
    if (basis[i] < (size_t)dim) x[basis[i]] = t[i][cols];
  return x;
}

}  // namespace hypercorr::lp
