#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "hypercorr/cube.hpp"

namespace hypercorr::families {

/// Principal ("dictator") family F_i = { A : i in A }.
inline SetFamily principal(int n, int i) {
  detail::check_dimension(n);
  if (i < 1 || i > n) throw_input("principal: index out of range");
  SetFamily f(n);
  uint32_t bit = 1u << (i - 1);
  for (uint32_t m = 0; m < f.point_count(); ++m)
    if (m & bit) f.insert(m);
  return f;
}

/// threshold(n, k) = { A : |A| >= k }; k in [0, n+1], both ends degenerate.
inline SetFamily threshold(int n, int k) {
  detail::check_dimension(n);
  if (k < 0 || k > n + 1) throw_input("threshold: k out of range");
  SetFamily f(n);
  for (uint32_t m = 0; m < f.point_count(); ++m)
    if (std::popcount(m) >= k) f.insert(m);
  return f;
}

inline SetFamily majority(int n) {
  if (n % 2 == 0) throw_input("majority: n must be odd");
  return threshold(n, (n + 1) / 2);
}

struct TribesParams {
  int r = 1;  // tribe size
  int m = 1;  // number of tribes; n = r * m
};

/// Tribes family A = { A : A contains some block S_i } with consecutive
/// blocks S_1 = {1..r}, ..., and its dual B = { B : B meets every block }.
inline std::pair<SetFamily, SetFamily> tribes(TribesParams p) {
  if (p.r < 1 || p.m < 1) throw_input("tribes: r and m must be >= 1");
  long n = (long)p.r * p.m;
  if (n > kMaxDimension) throw_limit("tribes: r*m exceeds the truth-table cap of 24");
  SetFamily a((int)n);
  std::vector<uint32_t> blocks(p.m);
  for (int i = 0; i < p.m; ++i) blocks[i] = ((1u << p.r) - 1) << (i * p.r);
  for (uint32_t m = 0; m < a.point_count(); ++m)
    for (uint32_t bl : blocks)
      if ((m & bl) == bl) {
        a.insert(m);
        break;
      }
  return {a, dual(a)};
}

struct TribesStats {
  int r = 0, m = 0;
  bool exact = false;
  double mu_a = 0, mu_b = 0, cor = 0, influence = 0;
  double ratio_chvatal = 0, ratio_balanced = 0;
  std::optional<Dyadic> mu_a_x, mu_b_x, cor_x, influence_x;
  std::optional<Rational> ratio_chvatal_x, ratio_balanced_x;
};

/// Closed forms: mu_B = (1-2^-r)^m, Cor = mu(A^c) mu(B) [1 - (1-(2^r-1)^-2)^m],
/// I_k = 2^(-r+1) (1-2^-r)^(m-1). Valid for any (r, m); float evaluation via
/// expm1/log1p so the tiny-correlation regime keeps full precision.
inline TribesStats tribes_closed_form(TribesParams p) {
  if (p.r < 1 || p.m < 1) throw_input("tribes: r and m must be >= 1");
  TribesStats s;
  s.r = p.r;
  s.m = p.m;
  double q = std::exp2(-(double)p.r);  // 2^-r
  double log1mq = std::log1p(-q);
  s.mu_b = std::exp(p.m * log1mq);
  double one_minus_mu_b = -std::expm1(p.m * log1mq);
  s.mu_a = one_minus_mu_b;
  double d = std::exp2((double)p.r) - 1.0;  // 2^r - 1
  s.cor = s.mu_b * s.mu_b * -std::expm1(p.m * std::log1p(-1.0 / (d * d)));
  s.influence = 2.0 * q * std::exp((p.m - 1) * log1mq);
  s.ratio_chvatal = s.cor / s.influence;
  s.ratio_balanced = s.cor / (s.influence * s.mu_b * one_minus_mu_b);
  return s;
}

/// Brute-force statistics from the truth tables; exact, r*m <= 24.
inline TribesStats tribes_exact(TribesParams p) {
  auto [a, b] = tribes(p);
  TribesStats s;
  s.r = p.r;
  s.m = p.m;
  s.exact = true;
  s.mu_a_x = a.measure();
  s.mu_b_x = b.measure();
  s.cor_x = correlation(a, b);
  s.influence_x = influence(a, 1);  // tribes are regular
  Rational cor(*s.cor_x), inf(*s.influence_x);
  Rational mub(*s.mu_b_x);
  s.ratio_chvatal_x = cor / inf;
  s.ratio_balanced_x = cor / (inf * mub * (Rational(1) - mub));
  s.mu_a = s.mu_a_x->to_double();
  s.mu_b = s.mu_b_x->to_double();
  s.cor = s.cor_x->to_double();
  s.influence = s.influence_x->to_double();
  s.ratio_chvatal = s.ratio_chvatal_x->to_double();
  s.ratio_balanced = s.ratio_balanced_x->to_double();
  return s;
}

/// floor of r(n) = log2 n - log2 log2 n + log2 log2 e, the tribe-size rule
/// that brings mu(B) near 1/2 along the n-indexed sequence.
inline int tribe_size_rule(int n) {
  if (n < 2) throw_input("tribe_size_rule: n must be >= 2");
  double r = std::log2((double)n) - std::log2(std::log2((double)n)) + std::log2(std::log2(std::exp(1.0)));
  return std::max(1, (int)std::floor(r));
}

/// Number of tribes bringing mu_B = (1-2^-r)^m nearest 1/2, ties toward
/// smaller m.
inline int tribes_balanced_m(int r) {
  if (r < 1) throw_input("tribes_balanced_m: r must be >= 1");
  double q = 1.0 - std::exp2(-(double)r);
  double target = std::log(0.5) / std::log(q);
  int lo = std::max(1, (int)std::floor(target));
  int hi = lo + 1;
  double dlo = std::fabs(std::pow(q, lo) - 0.5);
  double dhi = std::fabs(std::pow(q, hi) - 0.5);
  return dlo <= dhi ? lo : hi;
}

enum class FamilyClass {
  Increasing,
  Decreasing,
  IncreasingIntersecting,
  MaximalIntersecting,
  BalancedIncreasing,
};

inline const char* family_class_name(FamilyClass c) {
  switch (c) {
    case FamilyClass::Increasing: return "increasing";
    case FamilyClass::Decreasing: return "decreasing";
    case FamilyClass::IncreasingIntersecting: return "increasing-intersecting";
    case FamilyClass::MaximalIntersecting: return "maximal-intersecting";
    case FamilyClass::BalancedIncreasing: return "balanced-increasing";
  }
  return "?";
}

inline std::optional<FamilyClass> family_class_from_name(const std::string& s) {
  for (FamilyClass c : {FamilyClass::Increasing, FamilyClass::Decreasing,
                        FamilyClass::IncreasingIntersecting, FamilyClass::MaximalIntersecting,
                        FamilyClass::BalancedIncreasing})
    if (s == family_class_name(c)) return c;
  return std::nullopt;
}

inline constexpr int kMaxEnumerationDimension = 6;

/// Streams every family of a class exactly once, in a deterministic order.
///
/// Core walk: depth-first over up-sets, deciding masks in descending popcount
/// order, "out" branch before "in"; a mask may enter only when all its
/// immediate supersets are already in. Other classes are filters or the
/// complement image of this walk.
class EnumerationCursor {
 public:
  EnumerationCursor(int n, FamilyClass klass) : n_(n), klass_(klass), cur_(n) {
    if (n < 0 || n > kMaxEnumerationDimension)
      throw_limit("enumeration limited to n <= 6 (Dedekind growth)");
    order_.resize(size_t(1) << n);
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(), [](uint32_t a, uint32_t b) {
      int pa = std::popcount(a), pb = std::popcount(b);
      return pa != pb ? pa > pb : a < b;
    });
    stage_.assign(order_.size(), 0);
    taken_in_.assign(order_.size(), false);
  }

  std::optional<SetFamily> next() {
    while (advance()) {
      switch (klass_) {
        case FamilyClass::Increasing:
          return cur_;
        case FamilyClass::Decreasing:
          return family_complement(cur_);
        case FamilyClass::IncreasingIntersecting:
          if (is_intersecting(cur_)) return cur_;
          break;
        case FamilyClass::MaximalIntersecting:
          if (is_antipodal(cur_)) return cur_;
          break;
        case FamilyClass::BalancedIncreasing:
          if (is_balanced(cur_)) return cur_;
          break;
      }
    }
    return std::nullopt;
  }

 private:
  bool advance() {
    if (done_) return false;
    if (started_) {
      if (!step_up()) {
        done_ = true;
        return false;
      }
    }
    started_ = true;
    if (!descend()) {
      done_ = true;
      return false;
    }
    return true;
  }

  bool step_up() {
    if (depth_ == 0) return false;
    --depth_;
    if (taken_in_[depth_]) {
      cur_.erase(order_[depth_]);
      taken_in_[depth_] = false;
    }
    return true;
  }

  bool descend() {
    while (depth_ < order_.size()) {
      int8_t st = stage_[depth_];
      if (st == 0) {
        stage_[depth_] = 1;  // out
        ++depth_;
        if (depth_ < order_.size()) stage_[depth_] = 0;
      } else if (st == 1) {
        stage_[depth_] = 2;  // in, when every immediate superset is in
        uint32_t m = order_[depth_];
        if (may_enter(m)) {
          cur_.insert(m);
          taken_in_[depth_] = true;
          ++depth_;
          if (depth_ < order_.size()) stage_[depth_] = 0;
        }
      } else {
        if (!step_up()) return false;
      }
    }
    return true;
  }

  bool may_enter(uint32_t m) const {
    for (int j = 0; j < n_; ++j) {
      uint32_t bit = 1u << j;
      if (!(m & bit) && !cur_.contains(m | bit)) return false;
    }
    return true;
  }

  int n_;
  FamilyClass klass_;
  std::vector<uint32_t> order_;
  std::vector<int8_t> stage_;
  std::vector<bool> taken_in_;
  SetFamily cur_;
  size_t depth_ = 0;
  bool started_ = false;
  bool done_ = false;
};

template <class Fn>
void for_each_family(int n, FamilyClass klass, Fn&& fn) {
  EnumerationCursor cur(n, klass);
  while (auto f = cur.next()) fn(*f);
}

inline uint64_t count_families(int n, FamilyClass klass) {
  uint64_t c = 0;
  for_each_family(n, klass, [&](const SetFamily&) { ++c; });
  return c;
}

inline std::vector<SetFamily> enumerate_all(int n, FamilyClass klass) {
  std::vector<SetFamily> out;
  for_each_family(n, klass, [&](const SetFamily& f) { out.push_back(f); });
  return out;
}

/// Members of F none of whose proper subsets are members.
inline std::vector<uint32_t> minimal_members(const SetFamily& f) {
  std::vector<uint32_t> out;
  f.for_each_member([&](uint32_t m) {
    for (int j = 0; j < f.n(); ++j) {
      uint32_t bit = 1u << j;
      if ((m & bit) && f.contains(m ^ bit)) return;
    }
    out.push_back(m);
  });
  return out;
}

/// Non-members of increasing F all of whose proper supersets are members.
inline std::vector<uint32_t> maximal_non_members(const SetFamily& f) {
  std::vector<uint32_t> out;
  for (uint32_t m = 0; m < f.point_count(); ++m) {
    if (f.contains(m)) continue;
    bool ok = true;
    for (int j = 0; j < f.n() && ok; ++j) {
      uint32_t bit = 1u << j;
      if (!(m & bit) && !f.contains(m | bit)) ok = false;
    }
    if (ok) out.push_back(m);
  }
  return out;
}

enum class RandomModel { UpClosure, BiasedThreshold };

/// Deterministic in (n, seed, model, param). UpClosure draws `param` uniform
/// generator masks and up-closes; BiasedThreshold starts from a random
/// threshold family and applies `param` monotonicity-preserving toggles.
inline SetFamily random_increasing(int n, uint64_t seed, RandomModel model, int param) {
  detail::check_dimension(n);
  if (param < 0) throw_input("random_increasing: negative parameter");
  std::mt19937_64 rng(seed);
  if (model == RandomModel::UpClosure) {
    SetFamily gen(n);
    std::uniform_int_distribution<uint32_t> dist(0, (1u << n) - 1);
    for (int i = 0; i < param; ++i) gen.insert(dist(rng));
    return up_closure(gen);
  }
  std::uniform_int_distribution<int> kdist(0, n + 1);
  SetFamily f = threshold(n, kdist(rng));
  for (int step = 0; step < param; ++step) {
    std::vector<uint32_t> mins = minimal_members(f);
    std::vector<uint32_t> adds = maximal_non_members(f);
    size_t total = mins.size() + adds.size();
    if (total == 0) break;
    size_t pick = std::uniform_int_distribution<size_t>(0, total - 1)(rng);
    if (pick < mins.size())
      f.erase(mins[pick]);
    else
      f.insert(adds[pick - mins.size()]);
  }
  return f;
}

struct LiftedPair {
  SetFamily a;      // A' = A u { A + new element }
  SetFamily b;      // B' = { B + new element }
  CubeFunction f;   // {0,+-1}-valued antipodal function carried by B'
};

/// Lifts increasing families on the ground set {2..n} (passed as families of
/// dimension n-1) to [n], element 1 being the fresh coordinate (bit 0).
/// Guarantees Cor(A', B') = Cor(A, B) / 2, I_1(A') = 0, I_i(A') = I_i(A).
inline LiftedPair lift_pair(const SetFamily& a_small, const SetFamily& b_small) {
  if (a_small.n() != b_small.n()) throw_input("lift_pair: dimension mismatch");
  if (a_small.n() + 1 > kMaxDimension) throw_limit("lift_pair: lifted dimension exceeds 24");
  if (!is_increasing(a_small) || !is_increasing(b_small))
    throw_class("lift_pair: inputs must be increasing");
  int n = a_small.n() + 1;
  LiftedPair out{SetFamily(n), SetFamily(n), CubeFunction(n)};
  a_small.for_each_member([&](uint32_t s) {
    out.a.insert(s << 1);
    out.a.insert((s << 1) | 1);
  });
  b_small.for_each_member([&](uint32_t s) { out.b.insert((s << 1) | 1); });
  uint32_t full = out.a.full_mask();
  for (uint32_t m = 0; m < out.f.values.size(); ++m) {
    if (m & 1)
      out.f.values[m] = out.b.contains(m) ? 1 : 0;
    else
      out.f.values[m] = out.b.contains(full ^ m) ? -1 : 0;
  }
  return out;
}

}  // namespace hypercorr::families
