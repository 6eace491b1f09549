#pragma once

#include <queue>

#include "hypercorr/cube.hpp"
#include "hypercorr/families.hpp"
#include "hypercorr/lp.hpp"

namespace hypercorr::flow {

inline constexpr int kMaxFlowDimension = 12;  // 3^n arcs; 12 keeps the network small

struct FlowInstance {
  int n = 0;
  CubeFunction supply;  // f, nonnegative
  CubeFunction demand;  // g, nonnegative
};

struct FlowEdge {
  uint32_t from_mask = 0;  // A
  uint32_t to_mask = 0;    // B, with A subset of B
  Rational amount;
};

struct FlowResult {
  bool feasible = false;
  bool sum_mismatch = false;          // totals differ: no certificate search
  std::vector<FlowEdge> transport;    // marginals reproduce f and g when feasible
  std::optional<SetFamily> certificate;  // decreasing family with f(F) < g(F)
};

namespace detail {

struct Arc {
  int to;
  size_t rev;
  mpz_class cap;
};

class Dinic {
 public:
  explicit Dinic(int nodes) : g_(nodes) {}

  void add_arc(int u, int v, mpz_class cap) {
    g_[u].push_back({v, g_[v].size(), std::move(cap)});
    g_[v].push_back({u, g_[u].size() - 1, 0});
  }

  mpz_class max_flow(int s, int t) {
    mpz_class total = 0;
    while (bfs(s, t)) {
      it_.assign(g_.size(), 0);
      while (true) {
        mpz_class pushed = dfs(s, t, mpz_class(-1));
        if (pushed == 0) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from s in the final residual network.
  std::vector<bool> reachable(int s) const {
    std::vector<bool> seen(g_.size(), false);
    std::queue<int> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Arc& a : g_[u])
        if (a.cap > 0 && !seen[a.to]) {
          seen[a.to] = true;
          q.push(a.to);
        }
    }
    return seen;
  }

  const std::vector<std::vector<Arc>>& arcs() const { return g_; }

 private:
  bool bfs(int s, int t) {
    level_.assign(g_.size(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Arc& a : g_[u])
        if (a.cap > 0 && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          q.push(a.to);
        }
    }
    return level_[t] >= 0;
  }

  // limit < 0 means unbounded
  mpz_class dfs(int u, int t, mpz_class limit) {
    if (u == t) return limit;
    for (size_t& i = it_[u]; i < g_[u].size(); ++i) {
      Arc& a = g_[u][i];
      if (a.cap <= 0 || level_[a.to] != level_[u] + 1) continue;
      mpz_class next = (limit < 0 || a.cap < limit) ? a.cap : limit;
      mpz_class pushed = dfs(a.to, t, next);
      if (pushed > 0) {
        a.cap -= pushed;
        g_[a.to][a.rev].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<Arc>> g_;
  std::vector<int> level_;
  std::vector<size_t> it_;
};

/// Common-denominator integer scaling of a rational table.
struct ScaledTable {
  mpz_class den = 1;
  std::vector<mpz_class> nums;
};

inline ScaledTable scale_common(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  ScaledTable t;
  for (const auto* vec : {&a, &b})
    for (const Rational& x : *vec) {
      mpz_class d = x.value().get_den();
      mpz_lcm(t.den.get_mpz_t(), t.den.get_mpz_t(), d.get_mpz_t());
    }
  t.nums.reserve(a.size() + b.size());
  for (const auto* vec : {&a, &b})
    for (const Rational& x : *vec) {
      mpz_class q = t.den / x.value().get_den();
      t.nums.emplace_back(x.value().get_num() * q);
    }
  return t;
}

}  // namespace detail

/// Decides whether supply flows to demand (transport supported on pairs
/// A subset of B with the given marginals), by integral max-flow on the
/// common-denominator scaling. On infeasibility with matching totals, returns
/// the violating decreasing family: the complement of the up-closure of the
/// source-side min-cut.
inline FlowResult flow_to(int n, const std::vector<Rational>& supply,
                          const std::vector<Rational>& demand) {
  hypercorr::detail::check_dimension(n);
  if (n > kMaxFlowDimension) throw_limit("flow_to: n exceeds the network cap of 12");
  size_t points = size_t(1) << n;
  if (supply.size() != points || demand.size() != points)
    throw_input("flow_to: table size mismatch");
  for (const Rational& x : supply)
    if (x.sign() < 0) throw_input("flow_to: negative supply value");
  for (const Rational& x : demand)
    if (x.sign() < 0) throw_input("flow_to: negative demand value");

  FlowResult res;
  detail::ScaledTable scaled = detail::scale_common(supply, demand);
  std::span<const mpz_class> f(scaled.nums.data(), points);
  std::span<const mpz_class> g(scaled.nums.data() + points, points);

  mpz_class total_f = 0, total_g = 0;
  for (const mpz_class& x : f) total_f += x;
  for (const mpz_class& x : g) total_g += x;
  if (total_f != total_g) {
    res.sum_mismatch = true;
    return res;
  }

  // node ids: source, A-side masks, B-side masks, sink
  int source = 0, sink = (int)(2 * points + 1);
  auto a_node = [&](uint32_t m) { return (int)(1 + m); };
  auto b_node = [&](uint32_t m) { return (int)(1 + points + m); };
  detail::Dinic net(2 * (int)points + 2);
  mpz_class inf = total_f + 1;
  uint32_t full = (uint32_t)points - 1;
  for (uint32_t m = 0; m < points; ++m) {
    if (f[m] > 0) net.add_arc(source, a_node(m), f[m]);
    if (g[m] > 0) net.add_arc(b_node(m), sink, g[m]);
  }
  for (uint32_t a = 0; a < points; ++a) {
    if (f[a] == 0) continue;
    for (uint32_t sup = a;; sup = (sup + 1) | a) {  // supersets of a
      if (g[sup] > 0) net.add_arc(a_node(a), b_node(sup), inf);
      if (sup == full) break;
    }
  }

  mpz_class pushed = net.max_flow(source, sink);
  if (pushed == total_f) {
    res.feasible = true;
    for (uint32_t a = 0; a < points; ++a) {
      for (const detail::Arc& arc : net.arcs()[a_node(a)]) {
        if (arc.to <= (int)points || arc.to == sink || arc.to == source) continue;
        const mpz_class& amount = net.arcs()[arc.to][arc.rev].cap;
        if (amount > 0)
          res.transport.push_back(
              {a, (uint32_t)(arc.to - 1 - points), Rational(amount, scaled.den)});
      }
    }
    return res;
  }

  std::vector<bool> seen = net.reachable(source);
  SetFamily reach_a(n);
  for (uint32_t m = 0; m < points; ++m)
    if (seen[(size_t)a_node(m)]) reach_a.insert(m);
  res.certificate = family_complement(up_closure(reach_a));
  return res;
}

inline std::vector<Rational> to_rational_table(const CubeFunction& f) {
  std::vector<Rational> out;
  out.reserve(f.values.size());
  for (const Dyadic& v : f.values) out.emplace_back(v);
  return out;
}

inline FlowResult flow_to(const FlowInstance& inst) {
  return flow_to(inst.n, to_rational_table(inst.supply), to_rational_table(inst.demand));
}

/// Direct criterion: totals match and supply(I) >= demand(I) for every
/// decreasing I. Exhaustive over enumerated decreasing families, n <= 5.
inline bool flows_direct(int n, const std::vector<Rational>& supply,
                         const std::vector<Rational>& demand) {
  if (n > 5) throw_limit("flows_direct: exhaustive criterion limited to n <= 5");
  detail::ScaledTable scaled = detail::scale_common(supply, demand);
  size_t points = size_t(1) << n;
  std::span<const mpz_class> f(scaled.nums.data(), points);
  std::span<const mpz_class> g(scaled.nums.data() + points, points);
  mpz_class total_f = 0, total_g = 0;
  for (const mpz_class& x : f) total_f += x;
  for (const mpz_class& x : g) total_g += x;
  if (total_f != total_g) return false;
  bool ok = true;
  families::for_each_family(n, families::FamilyClass::Decreasing, [&](const SetFamily& i) {
    if (!ok) return;
    mpz_class diff = 0;
    i.for_each_member([&](uint32_t m) { diff += f[m] - g[m]; });
    if (diff < 0) ok = false;
  });
  return ok;
}

enum class LambdaKind { MaxCoordinate, Average };

struct LambdaScheme {
  LambdaKind kind = LambdaKind::MaxCoordinate;
  std::vector<int> permutation;  // 1-based coordinate order; empty = identity
};

/// Weights lambda_i of an antipodal f. MaxCoordinate assigns fhat(S)^2 to the
/// scheme-maximal coordinate of S; Average spreads it as fhat(S)^2 / |S| over
/// the members of S. Both are exact; weights sum to the nonempty spectral
/// mass 2^-(n-1) sum f*(T).
inline std::vector<Rational> kahn_lambda(const CubeFunction& f, const LambdaScheme& scheme) {
  Spectrum s = wht(f);
  if (!s.coeffs[0].is_zero()) throw_input("kahn_lambda: nonzero mean");
  std::vector<int> rank = hypercorr::detail::coordinate_ranks(f.n, scheme.permutation);
  std::vector<Rational> lambda(f.n, Rational(0));
  for (uint32_t mask = 1; mask < s.coeffs.size(); ++mask) {
    if (s.coeffs[mask].is_zero()) continue;
    Dyadic sq = s.coeffs[mask].square();
    if (scheme.kind == LambdaKind::MaxCoordinate) {
      int best = -1;
      for (uint32_t m = mask; m;) {
        int j = std::countr_zero(m);
        if (best < 0 || rank[j] > rank[best]) best = j;
        m &= m - 1;
      }
      lambda[best] += Rational(sq);
    } else {
      Rational share = Rational(sq) / Rational(std::popcount(mask));
      for (uint32_t m = mask; m;) {
        lambda[std::countr_zero(m)] += share;
        m &= m - 1;
      }
    }
  }
  return lambda;
}

struct KahnFlowCheck {
  std::vector<Rational> lambda;
  FlowResult result;
};

/// Forms f = 2 chi_F - 1 for a maximal intersecting F, builds
/// ftilde = sum lambda_i chi_i, and decides whether ftilde flows to
/// f* = chi_F. At n <= 5 the verdict is cross-checked against the direct
/// decreasing-family criterion.
inline KahnFlowCheck check_kahn_flow(const SetFamily& fam, const LambdaScheme& scheme) {
  if (!is_maximal_intersecting(fam))
    throw_class("check_kahn_flow: family is not maximal intersecting");
  AntipodalLift lift = antipodal_lift(fam);
  KahnFlowCheck out;
  out.lambda = kahn_lambda(lift.fn, scheme);
  size_t points = fam.point_count();
  std::vector<Rational> supply(points), demand(points);
  for (uint32_t m = 0; m < points; ++m) {
    Rational acc(0);
    for (uint32_t b = m; b;) {
      acc += out.lambda[std::countr_zero(b)];
      b &= b - 1;
    }
    supply[m] = acc;
    demand[m] = fam.contains(m) ? Rational(1) : Rational(0);
  }
  out.result = flow_to(fam.n(), supply, demand);
  if (fam.n() <= 5) {
    bool direct = flows_direct(fam.n(), supply, demand);
    if (direct != out.result.feasible)
      throw std::logic_error("check_kahn_flow: max-flow and direct criterion disagree");
  }
  return out;
}

struct KleitmanResult {
  bool feasible = false;
  std::vector<Rational> lambda;
};

/// Decides whether ANY convex combination of the dictators flows to chi_F,
/// by exact LP feasibility over the decreasing-family constraint system.
/// Dictator and uniform candidates are tried before the LP. n <= 5.
inline KleitmanResult kleitman_feasible(const SetFamily& fam) {
  if (!is_maximal_intersecting(fam))
    throw_class("kleitman_feasible: family is not maximal intersecting");
  int n = fam.n();
  if (n > 5) throw_limit("kleitman_feasible: constraint enumeration limited to n <= 5");
  if (n == 0) throw_input("kleitman_feasible: n must be positive");

  std::vector<SetFamily> dictators;
  for (int i = 1; i <= n; ++i) dictators.push_back(families::principal(n, i));

  // constraint rows: sum_i lambda_i |F_i cap I| >= |F cap I| per decreasing I
  struct Row {
    std::vector<long> a;
    long b;
  };
  std::vector<Row> rows;
  families::for_each_family(n, families::FamilyClass::Decreasing, [&](const SetFamily& dec) {
    Row r;
    r.a.resize(n);
    for (int i = 0; i < n; ++i)
      r.a[i] = (long)family_intersection(dictators[i], dec).size();
    r.b = (long)family_intersection(fam, dec).size();
    rows.push_back(std::move(r));
  });

  auto satisfies_all = [&](const std::vector<Rational>& lam) {
    for (const Row& r : rows) {
      Rational acc(0);
      for (int i = 0; i < n; ++i) acc += lam[i] * Rational(r.a[i]);
      if (acc < Rational(r.b)) return false;
    }
    return true;
  };

  KleitmanResult res;
  for (int i = 0; i < n; ++i) {
    std::vector<Rational> e(n, Rational(0));
    e[i] = Rational(1);
    if (satisfies_all(e)) {
      res.feasible = true;
      res.lambda = std::move(e);
      return res;
    }
  }
  std::vector<Rational> uniform(n, Rational(1, n));
  if (satisfies_all(uniform)) {
    res.feasible = true;
    res.lambda = std::move(uniform);
    return res;
  }

  // constraint generation: grow the working set by the most violated row
  std::vector<lp::LinearConstraint> working;
  {
    lp::LinearConstraint sum1;
    sum1.coeffs.assign(n, Rational(1));
    sum1.rhs = Rational(1);
    sum1.equality = true;
    working.push_back(std::move(sum1));
  }
  std::vector<Rational> lam = uniform;
  while (true) {
    const Row* worst = nullptr;
    Rational worst_slack(0);
    for (const Row& r : rows) {
      Rational acc(0);
      for (int i = 0; i < n; ++i) acc += lam[i] * Rational(r.a[i]);
      Rational slack = acc - Rational(r.b);
      if (slack.sign() < 0 && (!worst || slack < worst_slack)) {
        worst = &r;
        worst_slack = slack;
      }
    }
    if (!worst) {
      res.feasible = true;
      res.lambda = lam;
      return res;
    }
    lp::LinearConstraint c;
    c.coeffs.reserve(n);
    for (int i = 0; i < n; ++i) c.coeffs.emplace_back(worst->a[i]);
    c.rhs = Rational(worst->b);
    working.push_back(std::move(c));
    auto sol = lp::feasible_point(n, working);
    if (!sol) return res;  // infeasible for a subset, hence infeasible
    lam = *sol;
  }
}

}  // namespace hypercorr::flow
