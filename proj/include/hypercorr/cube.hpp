#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hypercorr/dyadic.hpp"

namespace hypercorr {

/// Hard cap for full truth-table representations: the O(n 2^n) transform is
/// ~4e8 exact operations at n = 24, which is the limit of desk-scale runs.
inline constexpr int kMaxDimension = 24;

namespace detail {

inline constexpr uint64_t kLowLane[6] = {
    0x5555555555555555ull, 0x3333333333333333ull, 0x0f0f0f0f0f0f0f0full,
    0x00ff00ff00ff00ffull, 0x0000ffff0000ffffull, 0x00000000ffffffffull,
};

inline int word_count(int n) { return n >= 6 ? 1 << (n - 6) : 1; }

inline void check_dimension(int n) {
  if (n < 0 || n > kMaxDimension) throw_input("dimension must be in [0, 24]");
}

/// rank[j] = position of 1-based coordinate j+1 in the given order; empty
/// order means identity. Used by the max-coordinate lambda schemes.
inline std::vector<int> coordinate_ranks(int n, const std::vector<int>& perm) {
  std::vector<int> rank(n);
  if (perm.empty()) {
    for (int i = 0; i < n; ++i) rank[i] = i;
    return rank;
  }
  if ((int)perm.size() != n) throw_input("permutation arity mismatch");
  std::vector<bool> seen(n, false);
  for (int pos = 0; pos < n; ++pos) {
    int c = perm[pos];
    if (c < 1 || c > n || seen[c - 1]) throw_input("invalid coordinate permutation");
    seen[c - 1] = true;
    rank[c - 1] = pos;
  }
  return rank;
}

}  // namespace detail

/// A family of subsets of [n], stored as a membership bitset over all 2^n
/// masks. Element i of [n] corresponds to bit i-1 of a mask; bit m of the
/// bitset is set iff the subset with mask m is a member.
class SetFamily {
 public:
  SetFamily() : n_(0), words_(1, 0) {}
  explicit SetFamily(int n) : n_(n), words_(detail::word_count(n), 0) {
    detail::check_dimension(n);
  }

  static SetFamily empty(int n) { return SetFamily(n); }
  static SetFamily full(int n) {
    SetFamily f(n);
    for (auto& w : f.words_) w = ~0ull;
    f.mask_tail();
    return f;
  }

  int n() const { return n_; }
  uint32_t point_count() const { return 1u << n_; }
  uint32_t full_mask() const { return (1u << n_) - 1; }

  bool contains(uint32_t mask) const { return (words_[mask >> 6] >> (mask & 63)) & 1; }
  void insert(uint32_t mask) { words_[mask >> 6] |= 1ull << (mask & 63); }
  void erase(uint32_t mask) { words_[mask >> 6] &= ~(1ull << (mask & 63)); }
  void set(uint32_t mask, bool member) { member ? insert(mask) : erase(mask); }

  size_t size() const {
    size_t c = 0;
    for (uint64_t w : words_) c += std::popcount(w);
    return c;
  }
  Dyadic measure() const { return Dyadic::scaled((long)size(), (unsigned)n_); }

  template <class Fn>
  void for_each_member(Fn&& fn) const {
    for (size_t wi = 0; wi < words_.size(); ++wi) {
      uint64_t w = words_[wi];
      while (w) {
        int b = std::countr_zero(w);
        fn((uint32_t)(wi * 64 + b));
        w &= w - 1;
      }
    }
  }

  friend bool operator==(const SetFamily& a, const SetFamily& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }
  friend bool operator!=(const SetFamily& a, const SetFamily& b) { return !(a == b); }

  /// Lexicographic order on the membership string (mask 0 first); the family
  /// lacking the first differing mask is smaller. Fixes witness identity.
  static bool tt_less(const SetFamily& a, const SetFamily& b) {
    for (size_t i = 0; i < a.words_.size() && i < b.words_.size(); ++i) {
      uint64_t d = a.words_[i] ^ b.words_[i];
      if (d) {
        uint64_t low = d & -d;
        return (a.words_[i] & low) == 0;
      }
    }
    return false;
  }

  const std::vector<uint64_t>& words() const { return words_; }
  std::vector<uint64_t>& mutable_words() { return words_; }
  void mask_tail() {
    if (n_ < 6) words_[0] &= (1ull << (1u << n_)) - 1;
  }

 private:
  int n_;
  std::vector<uint64_t> words_;
};

namespace detail {

/// Bitset of F with coordinate j (0-based) flipped in every mask.
inline SetFamily toggled(const SetFamily& f, int j) {
  SetFamily t(f.n());
  const auto& w = f.words();
  auto& o = t.mutable_words();
  if (j < 6) {
    int s = 1 << j;
    uint64_t low = kLowLane[j];
    for (size_t i = 0; i < w.size(); ++i) o[i] = ((w[i] & low) << s) | ((w[i] >> s) & low);
  } else {
    size_t d = size_t(1) << (j - 6);
    for (size_t i = 0; i < w.size(); i += 2 * d)
      for (size_t k = 0; k < d; ++k) {
        o[i + k] = w[i + d + k];
        o[i + d + k] = w[i + k];
      }
  }
  return t;
}

}  // namespace detail

inline SetFamily up_closure(const SetFamily& f) {
  SetFamily g = f;
  auto& w = g.mutable_words();
  for (int j = 0; j < g.n(); ++j) {
    if (j < 6) {
      int s = 1 << j;
      uint64_t low = detail::kLowLane[j];
      for (auto& x : w) x |= (x & low) << s;
    } else {
      size_t d = size_t(1) << (j - 6);
      for (size_t i = 0; i < w.size(); i += 2 * d)
        for (size_t k = 0; k < d; ++k) w[i + d + k] |= w[i + k];
    }
  }
  return g;
}

inline SetFamily down_closure(const SetFamily& f) {
  SetFamily g = f;
  auto& w = g.mutable_words();
  for (int j = 0; j < g.n(); ++j) {
    if (j < 6) {
      int s = 1 << j;
      uint64_t low = detail::kLowLane[j];
      for (auto& x : w) x |= (x >> s) & low;
    } else {
      size_t d = size_t(1) << (j - 6);
      for (size_t i = 0; i < w.size(); i += 2 * d)
        for (size_t k = 0; k < d; ++k) w[i + k] |= w[i + d + k];
    }
  }
  return g;
}

inline bool is_increasing(const SetFamily& f) {
  const auto& w = f.words();
  for (int j = 0; j < f.n(); ++j) {
    if (j < 6) {
      int s = 1 << j;
      uint64_t low = detail::kLowLane[j];
      for (uint64_t x : w)
        if ((x & low) & ~((x >> s) & low)) return false;
    } else {
      size_t d = size_t(1) << (j - 6);
      for (size_t i = 0; i < w.size(); i += 2 * d)
        for (size_t k = 0; k < d; ++k)
          if (w[i + k] & ~w[i + d + k]) return false;
    }
  }
  return true;
}

inline bool is_decreasing(const SetFamily& f) {
  const auto& w = f.words();
  for (int j = 0; j < f.n(); ++j) {
    if (j < 6) {
      int s = 1 << j;
      uint64_t low = detail::kLowLane[j];
      for (uint64_t x : w)
        if (((x >> s) & low) & ~(x & low)) return false;
    } else {
      size_t d = size_t(1) << (j - 6);
      for (size_t i = 0; i < w.size(); i += 2 * d)
        for (size_t k = 0; k < d; ++k)
          if (w[i + d + k] & ~w[i + k]) return false;
    }
  }
  return true;
}

inline bool is_antipodal(const SetFamily& f) {
  if (f.n() == 0) return f.contains(0);
  uint32_t full = f.full_mask();
  for (uint32_t m = 0; m < f.point_count() / 2; ++m)
    if (f.contains(m) == f.contains(full ^ m)) return false;
  return true;
}

inline bool is_intersecting(const SetFamily& f) {
  SetFamily up = up_closure(f);
  uint32_t full = f.full_mask();
  bool ok = true;
  f.for_each_member([&](uint32_t m) {
    if (up.contains(full ^ m)) ok = false;
  });
  return ok;
}

inline bool is_balanced(const SetFamily& f) { return 2 * f.size() == f.point_count(); }

/// Members of F that leave F when coordinate k (1-based) flips; I_k is twice
/// this count over 2^n.
inline long boundary_count(const SetFamily& f, int k) {
  if (k < 1 || k > f.n()) throw_input("coordinate out of range");
  SetFamily t = detail::toggled(f, k - 1);
  const auto& w = f.words();
  const auto& tw = t.words();
  long c = 0;
  for (size_t i = 0; i < w.size(); ++i) c += std::popcount(w[i] & ~tw[i]);
  return c;
}

inline Dyadic influence(const SetFamily& f, int k) {
  return Dyadic::scaled(2 * boundary_count(f, k), (unsigned)f.n());
}

struct InfluenceVector {
  int n = 0;
  std::vector<Dyadic> entries;  // I_1 .. I_n
  Dyadic total;
  Dyadic minimum;
};

inline InfluenceVector influences(const SetFamily& f) {
  InfluenceVector v;
  v.n = f.n();
  v.entries.reserve(f.n());
  for (int k = 1; k <= f.n(); ++k) v.entries.push_back(influence(f, k));
  v.total = Dyadic::sum(v.entries);
  v.minimum = v.entries.empty() ? Dyadic(0) : v.entries[0];
  for (const Dyadic& e : v.entries)
    if (e < v.minimum) v.minimum = e;
  return v;
}

inline bool is_regular(const SetFamily& f) {
  if (f.n() <= 1) return true;
  long c1 = boundary_count(f, 1);
  for (int k = 2; k <= f.n(); ++k)
    if (boundary_count(f, k) != c1) return false;
  return true;
}

struct FamilyPredicates {
  bool increasing = false;
  bool decreasing = false;
  bool intersecting = false;
  bool antipodal = false;
  bool regular = false;
  bool balanced = false;
};

inline FamilyPredicates predicates(const SetFamily& f) {
  FamilyPredicates p;
  p.increasing = is_increasing(f);
  p.decreasing = is_decreasing(f);
  p.intersecting = is_intersecting(f);
  p.antipodal = is_antipodal(f);
  p.regular = is_regular(f);
  p.balanced = is_balanced(f);
  return p;
}

inline bool is_maximal_intersecting(const SetFamily& f) {
  return is_increasing(f) && is_antipodal(f);
}

/// Cor(A, B) = mu(A and B) - mu(A) mu(B), exactly.
inline Dyadic correlation(const SetFamily& a, const SetFamily& b) {
  if (a.n() != b.n()) throw_input("correlation: dimension mismatch");
  const auto& wa = a.words();
  const auto& wb = b.words();
  long inter = 0;
  for (size_t i = 0; i < wa.size(); ++i) inter += std::popcount(wa[i] & wb[i]);
  long num = (inter << a.n()) - (long)a.size() * (long)b.size();
  return Dyadic::scaled(num, 2 * (unsigned)a.n());
}

/// Set complement within the cube: Omega \ F.
inline SetFamily family_complement(const SetFamily& f) {
  SetFamily g = f;
  for (auto& w : g.mutable_words()) w = ~w;
  g.mask_tail();
  return g;
}

/// Dual family F' = { B : complement(B) not in F }. Involution; increasing
/// inputs stay increasing; F antipodal iff F == F'.
inline SetFamily dual(const SetFamily& f) {
  SetFamily g(f.n());
  uint32_t full = f.full_mask();
  for (uint32_t m = 0; m < f.point_count(); ++m)
    if (!f.contains(full ^ m)) g.insert(m);
  return g;
}

inline SetFamily family_intersection(const SetFamily& a, const SetFamily& b) {
  SetFamily g = a;
  for (size_t i = 0; i < g.words().size(); ++i) g.mutable_words()[i] &= b.words()[i];
  return g;
}

inline SetFamily family_union(const SetFamily& a, const SetFamily& b) {
  SetFamily g = a;
  for (size_t i = 0; i < g.words().size(); ++i) g.mutable_words()[i] |= b.words()[i];
  return g;
}

/// (F+, F-) = (F intersect F', F union F') for increasing F.
inline std::pair<SetFamily, SetFamily> plus_minus_parts(const SetFamily& f) {
  if (!is_increasing(f)) throw_class("plus_minus_parts: family is not increasing");
  SetFamily d = dual(f);
  return {family_intersection(f, d), family_union(f, d)};
}

/// Exact function on all 2^n points of the cube.
struct CubeFunction {
  int n = 0;
  std::vector<Dyadic> values;

  CubeFunction() : values(1) {}
  explicit CubeFunction(int n_) : n(n_), values(size_t(1) << n_) { detail::check_dimension(n_); }
};

inline CubeFunction indicator(const SetFamily& f) {
  CubeFunction g(f.n());
  f.for_each_member([&](uint32_t m) { g.values[m] = Dyadic(1); });
  return g;
}

/// Fourier-Walsh coefficient table indexed by set mask S.
struct Spectrum {
  int n = 0;
  std::vector<Dyadic> coeffs;

  Spectrum() : coeffs(1) {}
  explicit Spectrum(int n_) : n(n_), coeffs(size_t(1) << n_) { detail::check_dimension(n_); }
};

namespace detail {

/// In-place unnormalized Walsh-Hadamard butterfly over numerators aligned to
/// a common exponent. int64 path is taken when every intermediate provably
/// fits (|scaled| < 2^(62-n)); otherwise falls back to mpz.
struct AlignedTable {
  unsigned exp = 0;
  std::vector<mpz_class> nums;
};

inline AlignedTable align(const std::vector<Dyadic>& vals) {
  AlignedTable t;
  for (const Dyadic& v : vals) t.exp = std::max(t.exp, v.exponent());
  t.nums.reserve(vals.size());
  for (const Dyadic& v : vals) t.nums.emplace_back(v.numerator() << (t.exp - v.exponent()));
  return t;
}

inline void butterfly(std::vector<mpz_class>& v) {
  size_t n = v.size();
  mpz_class a, b;
  for (size_t len = 1; len < n; len <<= 1)
    for (size_t i = 0; i < n; i += 2 * len)
      for (size_t k = i; k < i + len; ++k) {
        a = v[k] + v[k + len];
        b = v[k] - v[k + len];
        v[k] = std::move(a);
        v[k + len] = std::move(b);
      }
}

inline void butterfly(std::vector<int64_t>& v) {
  size_t n = v.size();
  for (size_t len = 1; len < n; len <<= 1)
    for (size_t i = 0; i < n; i += 2 * len)
      for (size_t k = i; k < i + len; ++k) {
        int64_t a = v[k] + v[k + len];
        int64_t b = v[k] - v[k + len];
        v[k] = a;
        v[k + len] = b;
      }
}

inline std::vector<Dyadic> walsh_transform(const std::vector<Dyadic>& vals, int n,
                                           unsigned extra_exp) {
  AlignedTable t = align(vals);
  bool small = true;
  for (const mpz_class& z : t.nums)
    if (mpz_sizeinbase(z.get_mpz_t(), 2) + (size_t)n > 62) {
      small = false;
      break;
    }
  std::vector<Dyadic> out;
  out.reserve(vals.size());
  if (small) {
    std::vector<int64_t> v(t.nums.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = t.nums[i].get_si();
    butterfly(v);
    for (int64_t x : v) out.emplace_back(Dyadic::scaled(x, t.exp + extra_exp));
  } else {
    butterfly(t.nums);
    for (mpz_class& z : t.nums) out.emplace_back(Dyadic(std::move(z), t.exp + extra_exp));
  }
  return out;
}

}  // namespace detail

/// Forward transform: coeffs[S] = 2^-n sum_T f(T) (-1)^|S cap T|, exact.
inline Spectrum wht(const CubeFunction& f) {
  Spectrum s(f.n);
  s.coeffs = detail::walsh_transform(f.values, f.n, (unsigned)f.n);
  return s;
}

/// Synthesis: f(T) = sum_S coeffs[S] (-1)^|S cap T|; inverse_wht(wht(f)) == f.
inline CubeFunction inverse_wht(const Spectrum& s) {
  CubeFunction f(s.n);
  f.values = detail::walsh_transform(s.coeffs, s.n, 0);
  return f;
}

inline Dyadic div_pow2(const Dyadic& d, unsigned k) {
  return Dyadic(d.numerator(), d.exponent() + k);
}

inline Dyadic mean(const CubeFunction& f) { return div_pow2(Dyadic::sum(f.values), (unsigned)f.n); }

/// Cor(f, g) = E[fg] - E[f] E[g] under the uniform measure, exact.
inline Dyadic correlation(const CubeFunction& f, const CubeFunction& g) {
  if (f.n != g.n) throw_input("correlation: dimension mismatch");
  std::vector<Dyadic> prods(f.values.size());
  for (size_t i = 0; i < prods.size(); ++i) prods[i] = f.values[i] * g.values[i];
  return div_pow2(Dyadic::sum(prods), (unsigned)f.n) - mean(f) * mean(g);
}

/// sum over nonempty S of fhat(S) ghat(S); equals Cor(f, g) by Parseval.
inline Dyadic spectral_correlation(const Spectrum& a, const Spectrum& b) {
  if (a.n != b.n) throw_input("spectral_correlation: dimension mismatch");
  std::vector<Dyadic> prods;
  prods.reserve(a.coeffs.size());
  for (size_t s = 1; s < a.coeffs.size(); ++s) prods.push_back(a.coeffs[s] * b.coeffs[s]);
  return Dyadic::sum(prods);
}

enum class DiffConvention { Full, Half };

/// Delta_i f(x) = f(x) - f(x xor e_i) (Full) or half of it (Half). Under the
/// Half convention the coefficient at S is exactly [i in S] * fhat(S).
inline CubeFunction directional_difference(const CubeFunction& f, int i, DiffConvention conv) {
  if (i < 1 || i > f.n) throw_input("coordinate out of range");
  uint32_t bit = 1u << (i - 1);
  CubeFunction g(f.n);
  for (uint32_t m = 0; m < f.values.size(); ++m) {
    Dyadic d = f.values[m] - f.values[m ^ bit];
    if (conv == DiffConvention::Half) d = Dyadic(d.numerator(), d.exponent() + 1);
    g.values[m] = d;
  }
  return g;
}

/// f*(x) = max(f(x), 0)^2, exact.
inline CubeFunction f_star(const CubeFunction& f) {
  CubeFunction g(f.n);
  for (size_t i = 0; i < f.values.size(); ++i)
    if (f.values[i].sign() > 0) g.values[i] = f.values[i].square();
  return g;
}

struct AntipodalLift {
  CubeFunction fn;
  bool antipodal = false;  // false flags a merely plus/minus-one-valued result
};

/// f = 2 chi_F - 1. When F is antipodal, f(complement A) = -f(A) and all
/// even-size Fourier coefficients vanish.
inline AntipodalLift antipodal_lift(const SetFamily& f) {
  AntipodalLift r;
  r.fn = CubeFunction(f.n());
  for (uint32_t m = 0; m < f.point_count(); ++m) r.fn.values[m] = f.contains(m) ? 1 : -1;
  r.antipodal = is_antipodal(f);
  return r;
}

/// Spectral moment M_alpha = sum over nonempty S of fhat(S)^2 / |S|^alpha,
/// evaluated in double from the exact squared coefficients. alpha = 0 returns
/// the exact sum cast to double.
inline double m_alpha(const CubeFunction& f, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw_input("m_alpha: alpha must lie in [0, 1]");
  Spectrum s = wht(f);
  if (!s.coeffs[0].is_zero()) throw_input("m_alpha: nonzero mean");
  if (alpha == 0.0) {
    std::vector<Dyadic> sq;
    sq.reserve(s.coeffs.size());
    for (size_t m = 1; m < s.coeffs.size(); ++m) sq.push_back(s.coeffs[m].square());
    return Dyadic::sum(sq).to_double();
  }
  double acc = 0.0;
  for (size_t m = 1; m < s.coeffs.size(); ++m) {
    if (s.coeffs[m].is_zero()) continue;
    acc += s.coeffs[m].square().to_double() / std::pow((double)std::popcount(m), alpha);
  }
  return acc;
}

/// Sum of the q smallest influences with q = max(1, floor(gamma log2(1/mu))),
/// ties broken by coordinate index.
inline Dyadic s_gamma(const SetFamily& f, double gamma) {
  if (gamma <= 0.0) throw_input("s_gamma: gamma must be positive");
  size_t sz = f.size();
  if (sz == 0 || sz == f.point_count()) throw_input("s_gamma: degenerate measure");
  double log_inv_mu = (double)f.n() - std::log2((double)sz);
  long q = (long)std::floor(gamma * log_inv_mu);
  q = std::max(1l, std::min(q, (long)f.n()));
  InfluenceVector iv = influences(f);
  std::vector<int> idx(f.n());
  for (int i = 0; i < f.n(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    int c = Dyadic::cmp(iv.entries[a], iv.entries[b]);
    return c != 0 ? c < 0 : a < b;
  });
  std::vector<Dyadic> chosen;
  for (long i = 0; i < q; ++i) chosen.push_back(iv.entries[idx[i]]);
  return Dyadic::sum(chosen);
}

/// Canonical little-endian hex encoding of the membership bitset: hex digit d
/// carries masks 4d .. 4d+3, bit k of the digit = membership of mask 4d+k.
inline std::string tt_hex(const SetFamily& f) {
  uint32_t points = f.point_count();
  size_t digits = (points + 3) / 4;
  std::string out(digits, '0');
  for (size_t d = 0; d < digits; ++d) {
    int v = 0;
    for (int k = 0; k < 4; ++k) {
      uint32_t m = (uint32_t)(4 * d + k);
      if (m < points && f.contains(m)) v |= 1 << k;
    }
    out[d] = "0123456789abcdef"[v];
  }
  return out;
}

inline SetFamily family_from_tt(int n, const std::string& hex) {
  SetFamily f(n);
  uint32_t points = f.point_count();
  size_t digits = (points + 3) / 4;
  if (hex.size() != digits) throw_input("tt: wrong hex length for dimension");
  for (size_t d = 0; d < digits; ++d) {
    char c = hex[d];
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw_input("tt: invalid hex digit");
    for (int k = 0; k < 4; ++k) {
      uint32_t m = (uint32_t)(4 * d + k);
      if (m < points && (v >> k & 1)) f.insert(m);
    }
  }
  return f;
}

}  // namespace hypercorr
