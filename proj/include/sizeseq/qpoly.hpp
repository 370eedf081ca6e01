#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sizeseq/checked.hpp"
#include "sizeseq/verdict.hpp"

namespace sizeseq {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

class OutOfDomainError : public Error {
 public:
  explicit OutOfDomainError(Index n, Index threshold)
      : Error(ErrorCode::type,
              "index " + std::to_string(n) + " below symbolic threshold " +
                  std::to_string(threshold)) {}
};

inline BigInt rat_floor(const BigRat& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt r = n / d;
  if (n % d != 0 && n < 0) --r;
  return r;
}

inline BigInt rat_ceil(const BigRat& q) { return -rat_floor(-q); }

inline Count to_count(const BigInt& v, Index at, const char* op) {
  if (v < 0 || v > BigInt(std::numeric_limits<Count>::max()))
    throw OverflowError(at, op);
  return v.convert_to<Count>();
}

// Dense rational polynomials, coefficient of x^i at position i.
namespace ratpoly {

using Poly = std::vector<BigRat>;

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] += b[i];
  }
  trim(r);
  return r;
}

inline Poly sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] -= b[i];
  }
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

inline Poly scale(Poly a, const BigRat& c) {
  for (auto& x : a) x *= c;
  trim(a);
  return a;
}

inline BigRat value(const Poly& p, const BigRat& x) {
  BigRat acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// p(a*x + b)
inline Poly compose_affine(const Poly& p, const BigRat& a, const BigRat& b) {
  Poly acc;
  Poly lin = {b, a};
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    acc = add(mul(acc, lin), Poly{*it});
  return acc;
}

}  // namespace ratpoly

// Integer-valued polynomial on a residue class, stored as an integer
// combination of binomial coefficients C(t, i) in the class variable t.
class BinomialPoly {
 public:
  BinomialPoly() = default;
  explicit BinomialPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) {
    trim();
  }

  // From a rational polynomial in t that takes integer values on all integers.
  static BinomialPoly from_monomial(const ratpoly::Poly& mono) {
    std::size_t d = mono.size();
    std::vector<BigRat> vals(d);  // values at t = 0..d-1
    for (std::size_t t = 0; t < d; ++t)
      vals[t] = ratpoly::value(mono, BigRat(static_cast<int>(t)));
    // forward differences: coeff i becomes delta^i at 0
    std::vector<BigInt> coeffs;
    coeffs.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (denominator(vals[0]) != 1)
        throw std::logic_error("binomial-basis conversion: non-integer value");
      coeffs.push_back(numerator(vals[0]));
      for (std::size_t j = 0; j + 1 < vals.size() - i; ++j)
        vals[j] = vals[j + 1] - vals[j];
    }
    return BinomialPoly(std::move(coeffs));
  }

  ratpoly::Poly to_monomial() const {
    ratpoly::Poly acc;       // sum so far
    ratpoly::Poly basis{1};  // C(t, i), starts at C(t,0) = 1
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i > 0) {
        // C(t,i) = C(t,i-1) * (t - (i-1)) / i
        basis = ratpoly::scale(
            ratpoly::mul(basis, {BigRat(-static_cast<int>(i - 1)), 1}),
            BigRat(1, static_cast<int>(i)));
      }
      acc = ratpoly::add(acc, ratpoly::scale(basis, BigRat(c_[i])));
    }
    return acc;
  }

  BigInt value_at(const BigInt& t) const {
    BigInt acc = 0;
    BigInt binom = 1;  // C(t, i)
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i > 0) {
        binom *= t - BigInt(static_cast<int>(i - 1));
        binom /= static_cast<int>(i);
      }
      acc += c_[i] * binom;
    }
    return acc;
  }

  bool is_zero() const { return c_.empty(); }
  const std::vector<BigInt>& coeffs() const { return c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<BigInt> c_;
};

// Piecewise-polynomial sequence value: for n >= threshold and n = period*t + r,
// value(n) = classes[r](t). Exact integer arithmetic throughout.
class QuasiPolynomial {
 public:
  QuasiPolynomial() : period_(1), threshold_(1), classes_(1) {}

  QuasiPolynomial(std::uint64_t period, Index threshold,
                  std::vector<BinomialPoly> classes)
      : period_(period), threshold_(std::max<Index>(threshold, 1)),
        classes_(std::move(classes)) {
    if (period_ == 0 || classes_.size() != period_)
      throw std::logic_error("quasi-polynomial: class count must equal period");
  }

  static QuasiPolynomial constant(Count k) {
    return QuasiPolynomial(1, 1, {BinomialPoly({BigInt(k)})});
  }

  // Class polynomials given in the monomial basis of n (one per residue).
  static QuasiPolynomial from_monomial_in_n(
      std::uint64_t period, Index threshold,
      const std::vector<ratpoly::Poly>& polys_in_n) {
    std::vector<BinomialPoly> cls;
    cls.reserve(period);
    for (std::uint64_t r = 0; r < period; ++r) {
      // substitute n = period*t + r
      ratpoly::Poly in_t = ratpoly::compose_affine(
          polys_in_n[r], BigRat(period), BigRat(r));
      cls.push_back(BinomialPoly::from_monomial(in_t));
    }
    return QuasiPolynomial(period, threshold, std::move(cls));
  }

  // a*n + b
  static QuasiPolynomial affine(const BigInt& a, const BigInt& b,
                                Index threshold = 1) {
    return from_monomial_in_n(1, threshold, {{BigRat(b), BigRat(a)}});
  }

  // n^d
  static QuasiPolynomial power(unsigned d, Index threshold = 1) {
    ratpoly::Poly p(d + 1);
    p[d] = 1;
    return from_monomial_in_n(1, threshold, {p});
  }

  // floor(n / k)
  static QuasiPolynomial floor_div(std::uint64_t k) {
    std::vector<BinomialPoly> cls(k, BinomialPoly({BigInt(0), BigInt(1)}));
    return QuasiPolynomial(k, 1, std::move(cls));
  }

  // ceil(n / k)
  static QuasiPolynomial ceil_div(std::uint64_t k) {
    std::vector<BinomialPoly> cls;
    cls.reserve(k);
    for (std::uint64_t r = 0; r < k; ++r)
      cls.push_back(r == 0 ? BinomialPoly({BigInt(0), BigInt(1)})
                           : BinomialPoly({BigInt(1), BigInt(1)}));
    return QuasiPolynomial(k, 1, std::move(cls));
  }

  std::uint64_t period() const { return period_; }
  Index threshold() const { return threshold_; }
  const std::vector<BinomialPoly>& classes() const { return classes_; }

  // Rational polynomial in n for residue r (0 <= r < period).
  ratpoly::Poly n_poly(std::uint64_t r) const {
    // t = (n - r) / period
    BigRat inv_p = BigRat(1) / BigRat(period_);
    return ratpoly::compose_affine(classes_[r].to_monomial(), inv_p,
                                   -(BigRat(r) * inv_p));
  }

  BigInt value_at(Index n) const {
    std::uint64_t r = n % period_;
    BigInt t = BigInt((n - r) / period_);
    return classes_[r].value_at(t);
  }

  Count eval(Index n) const {
    if (n < threshold_) throw OutOfDomainError(n, threshold_);
    return to_count(value_at(n), n, "symbolic eval");
  }

  QuasiPolynomial with_threshold(Index t) const {
    return QuasiPolynomial(period_, t, classes_);
  }

  // Smallest period whose aligned classes agree as polynomials in n.
  QuasiPolynomial normalized() const {
    for (std::uint64_t q = 1; q < period_; ++q) {
      if (period_ % q != 0) continue;
      bool ok = true;
      for (std::uint64_t r = 0; ok && r < period_; ++r)
        if (n_poly(r) != n_poly(r % q)) ok = false;
      if (ok) {
        std::vector<ratpoly::Poly> polys;
        polys.reserve(q);
        for (std::uint64_t r = 0; r < q; ++r) polys.push_back(n_poly(r));
        return from_monomial_in_n(q, threshold_, polys);
      }
    }
    return *this;
  }

  std::string to_string() const;

 private:
  std::uint64_t period_;
  Index threshold_;
  std::vector<BinomialPoly> classes_;
};

namespace detail {

inline std::string rat_str(const BigRat& q) {
  std::ostringstream os;
  if (denominator(q) == 1) {
    os << numerator(q);
  } else {
    os << numerator(q) << "/" << denominator(q);
  }
  return os.str();
}

inline std::string poly_in_n_str(const ratpoly::Poly& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] == 0) continue;
    BigRat c = p[i];
    if (first) {
      if (c < 0) { os << "-"; c = -c; }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;
    bool unit = (c == 1) && i > 0;
    if (!unit) os << rat_str(c);
    if (i > 0) {
      if (!unit) os << "*";
      os << "n";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

inline std::string class_name(std::uint64_t r, std::uint64_t p) {
  if (p == 1) return "all n";
  if (p == 2) return r == 0 ? "even" : "odd";
  return "n=" + std::to_string(r) + " (mod " + std::to_string(p) + ")";
}

}  // namespace detail

inline std::string QuasiPolynomial::to_string() const {
  std::ostringstream os;
  os << "period " << period_ << ", threshold " << threshold_;
  for (std::uint64_t r = 0; r < period_; ++r)
    os << "; " << detail::class_name(r, period_) << ": "
       << detail::poly_in_n_str(n_poly(r));
  return os.str();
}

namespace detail {

// Past this bound the sign of p(n) equals the sign of its leading coefficient
// (Cauchy root bound), clamped into Index range.
inline Index sign_stable_from(const ratpoly::Poly& p) {
  if (p.size() <= 1) return 1;
  BigRat lead = p.back();
  BigRat m = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    BigRat a = p[i] / lead;
    if (a < 0) a = -a;
    if (a > m) m = a;
  }
  BigInt b = rat_floor(1 + m) + 1;
  if (b > BigInt(std::numeric_limits<Index>::max() / 2))
    return std::numeric_limits<Index>::max() / 2;
  return b.convert_to<Index>();
}

inline int rat_sign(const BigRat& q) {
  if (q > 0) return 1;
  if (q < 0) return -1;
  return 0;
}

}  // namespace detail

inline QuasiPolynomial qp_binop(const QuasiPolynomial& a,
                                const QuasiPolynomial& b, char op) {
  std::uint64_t L = std::lcm(a.period(), b.period());
  Index T = std::max(a.threshold(), b.threshold());
  std::vector<ratpoly::Poly> polys;
  polys.reserve(L);
  for (std::uint64_t r = 0; r < L; ++r) {
    ratpoly::Poly pa = a.n_poly(r % a.period());
    ratpoly::Poly pb = b.n_poly(r % b.period());
    switch (op) {
      case '+': polys.push_back(ratpoly::add(pa, pb)); break;
      case '-': polys.push_back(ratpoly::sub(pa, pb)); break;
      case '*': polys.push_back(ratpoly::mul(pa, pb)); break;
    }
  }
  return QuasiPolynomial::from_monomial_in_n(L, T, polys).normalized();
}

inline QuasiPolynomial qp_add(const QuasiPolynomial& a,
                              const QuasiPolynomial& b) {
  return qp_binop(a, b, '+');
}

inline QuasiPolynomial qp_mul(const QuasiPolynomial& a,
                              const QuasiPolynomial& b) {
  return qp_binop(a, b, '*');
}

// Eventual order of a vs b, decided per residue class of the common period.
inline ComparisonVerdict qp_compare(const QuasiPolynomial& a,
                                    const QuasiPolynomial& b) {
  std::uint64_t L = std::lcm(a.period(), b.period());
  Index T = std::max(a.threshold(), b.threshold());
  ComparisonVerdict v;
  v.reason = "symbolic residue classes";
  bool any_less = false, any_greater = false, any_equal = false;
  Index witness = T > 0 ? T - 1 : 0;
  std::uint64_t residue_less = 0, residue_greater = 0;

  constexpr Index kScanCap = 2'000'000;
  for (std::uint64_t r = 0; r < L; ++r) {
    ratpoly::Poly d = ratpoly::sub(a.n_poly(r % a.period()),
                                   b.n_poly(r % b.period()));
    ClassSign cs{r, L, 0};
    if (d.empty()) {
      any_equal = true;
    } else {
      int s = detail::rat_sign(d.back());
      cs.sign = s;
      if (s < 0) { any_less = true; residue_less = r; }
      else { any_greater = true; residue_greater = r; }
      // first class member from which the sign is guaranteed, then walk
      // backwards over exact evaluations to tighten it
      Index stable = std::max(T, detail::sign_stable_from(d));
      Index n0 = stable + ((r + L - stable % L) % L);  // first n >= stable, n=r mod L
      Index n = n0;
      Index steps = 0;
      while (n >= T + L && steps < kScanCap) {
        BigRat val = ratpoly::value(d, BigRat(BigInt(n - L)));
        if (detail::rat_sign(val) != s) break;
        n -= L;
        ++steps;
      }
      if (n > 0) witness = std::max(witness, n - 1);
    }
    v.classes.push_back(cs);
  }

  if (any_less && any_greater) {
    v.relation = Relation::Incomparable;
    v.incomparability = IncomparabilityProof{L, residue_less, residue_greater};
  } else if (any_less) {
    v.relation = any_equal ? Relation::LessEq : Relation::Less;
    v.witness = witness;
  } else if (any_greater) {
    v.relation = any_equal ? Relation::GreaterEq : Relation::Greater;
    v.witness = witness;
  } else {
    v.relation = Relation::Equal;
    v.witness = witness;
  }
  return v;
}

// True when a and b agree as functions from some index on.
inline bool qp_eventually_equal(const QuasiPolynomial& a,
                                const QuasiPolynomial& b) {
  return qp_compare(a, b).relation == Relation::Equal;
}

// a - b. Defined only when b does not eventually exceed a on any class; the
// result's threshold is pushed past any early negative values so that the
// non-negativity invariant holds from the threshold on.
inline QuasiPolynomial qp_sub(const QuasiPolynomial& a,
                              const QuasiPolynomial& b) {
  ComparisonVerdict v = qp_compare(b, a);
  if (v.relation != Relation::Less && v.relation != Relation::LessEq &&
      v.relation != Relation::Equal) {
    throw UndefinedDifferenceError(
        "difference has a negative leading class (minuend does not dominate)");
  }
  QuasiPolynomial d = qp_binop(a, b, '-');
  Index t = std::max(d.threshold(), v.witness ? *v.witness + 1 : Index{1});
  return d.with_threshold(std::max<Index>(t, 1));
}

}  // namespace sizeseq
