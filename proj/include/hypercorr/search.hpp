#pragma once

#include <thread>

#include "hypercorr/inequalities.hpp"

namespace hypercorr::search {

enum class Objective { MinMargin, MinRatio };

inline const char* objective_name(Objective o) {
  return o == Objective::MinMargin ? "min-margin" : "min-ratio";
}

struct ScanSpec {
  int n = 3;
  families::FamilyClass a_class = families::FamilyClass::Increasing;
  families::FamilyClass b_class = families::FamilyClass::Increasing;
  std::string checker;
  Objective objective = Objective::MinMargin;
  std::optional<uint64_t> budget;  // nullopt: exhaustive over both classes
  uint64_t seed = 0;
  ineq::Params params;
  int jobs = 1;
};

struct ExtremalRecord {
  bool found = false;  // at least one applicable instance
  double best = 0;
  std::optional<Rational> best_exact;
  std::string witness_a, witness_b;  // canonical tt digests
  int n = 0;
  uint64_t examined = 0;
  uint64_t vacuous = 0;
  uint64_t class_skipped = 0;
  double ratio_min = 0, ratio_median = 0;
  uint64_t ratio_count = 0;
  std::vector<double> trace;  // local search objective trace
};

namespace detail {

struct ObjectiveValue {
  bool applicable = false;
  double value = 0;
  std::optional<Rational> exact;
};

inline ObjectiveValue objective_of(const ineq::InequalityReport& r, Objective obj) {
  ObjectiveValue v;
  if (r.verdict == ineq::Verdict::Vacuous) return v;
  if (obj == Objective::MinMargin) {
    v.applicable = true;
    v.value = r.margin;
    v.exact = r.margin_exact;
    return v;
  }
  if (!r.ratio) return v;
  v.applicable = true;
  v.value = *r.ratio;
  if (r.lhs_exact && r.rhs_exact && r.rhs_exact->sign() > 0) v.exact = *r.lhs_exact / *r.rhs_exact;
  return v;
}

inline int ov_cmp(const ObjectiveValue& a, const ObjectiveValue& b) {
  if (a.exact && b.exact) {
    if (*a.exact < *b.exact) return -1;
    if (*b.exact < *a.exact) return 1;
    return 0;
  }
  if (a.value < b.value) return -1;
  if (b.value < a.value) return 1;
  return 0;
}

struct Partial {
  bool found = false;
  ObjectiveValue best;
  std::string wa, wb;
  uint64_t examined = 0, vacuous = 0, class_skipped = 0;
  std::vector<double> ratios;

  void take(const ObjectiveValue& v, const SetFamily& a, const SetFamily& b) {
    std::string ta = tt_hex(a), tb = tt_hex(b);
    int c = found ? ov_cmp(v, best) : -1;
    if (c < 0 || (c == 0 && (ta < wa || (ta == wa && tb < wb)))) {
      best = v;
      wa = std::move(ta);
      wb = std::move(tb);
    }
    found = true;
  }

  void absorb(Partial&& o) {
    examined += o.examined;
    vacuous += o.vacuous;
    class_skipped += o.class_skipped;
    ratios.insert(ratios.end(), o.ratios.begin(), o.ratios.end());
    if (!o.found) return;
    int c = found ? ov_cmp(o.best, best) : -1;
    if (c < 0 || (c == 0 && (o.wa < wa || (o.wa == wa && o.wb < wb)))) {
      best = o.best;
      wa = std::move(o.wa);
      wb = std::move(o.wb);
    }
    found = true;
  }
};

inline void eval_pair(const ScanSpec& spec, const SetFamily& a, const SetFamily& b, Partial& p) {
  ++p.examined;
  ineq::InequalityReport rep;
  try {
    rep = ineq::evaluate(spec.checker, a, b, spec.params);
  } catch (const Error& e) {
    if (e.kind() == Error::Kind::Class) {
      ++p.class_skipped;
      return;
    }
    throw;
  }
  if (rep.ratio) p.ratios.push_back(*rep.ratio);
  ObjectiveValue v = objective_of(rep, spec.objective);
  if (!v.applicable) {
    ++p.vacuous;
    return;
  }
  p.take(v, a, b);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic random draw from a family class. Monotone classes are
/// sampled directly; the enumerable niche classes are sampled uniformly from
/// their materialized lists (small n only).
class ClassSampler {
 public:
  ClassSampler(int n, families::FamilyClass klass) : n_(n), klass_(klass) {
    using FC = families::FamilyClass;
    if (klass == FC::Increasing || klass == FC::Decreasing) return;
    pool_ = families::enumerate_all(n, klass);
    if (pool_.empty()) throw_input("scan: family class is empty at this dimension");
  }

  SetFamily draw(uint64_t seed) const {
    using FC = families::FamilyClass;
    if (klass_ == FC::Increasing || klass_ == FC::Decreasing) {
      std::mt19937_64 rng(seed);
      int generators = (int)(rng() % (1u << std::max(0, n_ - 1))) + 1;
      SetFamily f =
          families::random_increasing(n_, rng(), families::RandomModel::UpClosure, generators);
      return klass_ == FC::Decreasing ? family_complement(f) : f;
    }
    return pool_[seed % pool_.size()];
  }

 private:
  int n_;
  families::FamilyClass klass_;
  std::vector<SetFamily> pool_;
};

inline ExtremalRecord finish_record(const ScanSpec& spec, Partial&& p) {
  ExtremalRecord rec;
  rec.n = spec.n;
  rec.examined = p.examined;
  rec.vacuous = p.vacuous;
  rec.class_skipped = p.class_skipped;
  rec.found = p.found;
  if (p.found) {
    rec.best = p.best.exact ? p.best.exact->to_double() : p.best.value;
    rec.best_exact = p.best.exact;
    rec.witness_a = p.wa;
    rec.witness_b = p.wb;
  }
  rec.ratio_count = p.ratios.size();
  if (!p.ratios.empty()) {
    std::sort(p.ratios.begin(), p.ratios.end());
    rec.ratio_min = p.ratios.front();
    rec.ratio_median = p.ratios[p.ratios.size() / 2];
  }
  return rec;
}

}  // namespace detail

/// Extremal scan over (A, B) pairs: exhaustive over enumerated classes when
/// budget is absent, seeded random otherwise. Deterministic given
/// (spec, seed); parallel chunks merge order-independently with lexicographic
/// witness tie-break.
inline ExtremalRecord scan(const ScanSpec& spec) {
  if (!ineq::find_checker(spec.checker)) throw_input("unknown inequality checker: " + spec.checker);
  int jobs = std::max(1, spec.jobs);

  std::vector<detail::Partial> parts(jobs);
  if (!spec.budget) {
    std::vector<SetFamily> as = families::enumerate_all(spec.n, spec.a_class);
    std::vector<SetFamily> bs = families::enumerate_all(spec.n, spec.b_class);
    auto worker = [&](int w) {
      size_t lo = as.size() * w / jobs, hi = as.size() * (w + 1) / jobs;
      for (size_t i = lo; i < hi; ++i)
        for (const SetFamily& b : bs) detail::eval_pair(spec, as[i], b, parts[w]);
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < jobs; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& t : pool) t.join();
  } else {
    detail::ClassSampler sa(spec.n, spec.a_class);
    detail::ClassSampler sb(spec.n, spec.b_class);
    uint64_t budget = *spec.budget;
    auto worker = [&](int w) {
      uint64_t lo = budget * w / jobs, hi = budget * (w + 1) / jobs;
      for (uint64_t i = lo; i < hi; ++i) {
        SetFamily a = sa.draw(detail::splitmix64(spec.seed ^ (2 * i)));
        SetFamily b = sb.draw(detail::splitmix64(spec.seed ^ (2 * i + 1)));
        detail::eval_pair(spec, a, b, parts[w]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < jobs; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& t : pool) t.join();
  }

  detail::Partial merged;
  for (auto& p : parts) merged.absorb(std::move(p));
  return detail::finish_record(spec, std::move(merged));
}

struct LocalSearchSpec {
  SetFamily a0, b0;
  std::string checker;
  Objective objective = Objective::MinMargin;
  uint64_t budget = 100;  // accepted moves
  uint64_t seed = 0;      // recorded; the descent itself is deterministic
  ineq::Params params;
};

/// Steepest-descent local search. Moves toggle a minimal member off or a
/// maximal non-member on (preserving monotonicity) of either family; moves
/// breaking the checker's class requirements are skipped. The objective trace
/// is monotone nonincreasing.
inline ExtremalRecord local_search(const LocalSearchSpec& ls) {
  ineq::InequalityReport rep = ineq::evaluate(ls.checker, ls.a0, ls.b0, ls.params);
  detail::ObjectiveValue cur = detail::objective_of(rep, ls.objective);
  if (!cur.applicable) throw_input("local_search: start instance is vacuous for this objective");

  SetFamily a = ls.a0, b = ls.b0;
  detail::Partial p;
  p.examined = 1;
  if (rep.ratio) p.ratios.push_back(*rep.ratio);
  p.take(cur, a, b);
  std::vector<double> trace{cur.exact ? cur.exact->to_double() : cur.value};

  auto candidate_masks = [](const SetFamily& f) {
    std::vector<std::pair<uint32_t, bool>> out;  // (mask, insert?)
    for (uint32_t m : families::minimal_members(f)) out.emplace_back(m, false);
    for (uint32_t m : families::maximal_non_members(f)) out.emplace_back(m, true);
    return out;
  };

  for (uint64_t moves = 0; moves < ls.budget; ++moves) {
    bool improved = false;
    detail::ObjectiveValue best_v;
    SetFamily best_a = a, best_b = b;
    for (int side = 0; side < 2; ++side) {
      const SetFamily& base = side == 0 ? a : b;
      for (auto [mask, ins] : candidate_masks(base)) {
        SetFamily cand = base;
        cand.set(mask, ins);
        const SetFamily& ca = side == 0 ? cand : a;
        const SetFamily& cb = side == 0 ? b : cand;
        ++p.examined;
        ineq::InequalityReport cr;
        try {
          cr = ineq::evaluate(ls.checker, ca, cb, ls.params);
        } catch (const Error& e) {
          if (e.kind() == Error::Kind::Class) {
            ++p.class_skipped;
            continue;
          }
          throw;
        }
        if (cr.ratio) p.ratios.push_back(*cr.ratio);
        detail::ObjectiveValue v = detail::objective_of(cr, ls.objective);
        if (!v.applicable) {
          ++p.vacuous;
          continue;
        }
        if (detail::ov_cmp(v, cur) < 0 && (!improved || detail::ov_cmp(v, best_v) < 0)) {
          improved = true;
          best_v = v;
          best_a = ca;
          best_b = cb;
        }
      }
    }
    if (!improved) break;
    a = best_a;
    b = best_b;
    cur = best_v;
    p.take(cur, a, b);
    trace.push_back(cur.exact ? cur.exact->to_double() : cur.value);
  }

  ScanSpec stub;
  stub.n = ls.a0.n();
  stub.checker = ls.checker;
  stub.objective = ls.objective;
  ExtremalRecord rec = detail::finish_record(stub, std::move(p));
  rec.trace = std::move(trace);
  return rec;
}

/// One sweep row per tribe size r, the tribe count chosen to balance mu_B.
inline std::vector<families::TribesStats> tribes_sweep(int r_lo, int r_hi, bool exact) {
  if (r_lo < 1 || r_hi < r_lo) throw_input("tribes_sweep: bad r range");
  std::vector<families::TribesStats> rows;
  for (int r = r_lo; r <= r_hi; ++r) {
    families::TribesParams p{r, families::tribes_balanced_m(r)};
    rows.push_back(exact ? families::tribes_exact(p) : families::tribes_closed_form(p));
  }
  return rows;
}

}  // namespace hypercorr::search
