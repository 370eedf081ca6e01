#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <variant>

#include "sizeseq/checked.hpp"

namespace sizeseq {

// ---- universes --------------------------------------------------------------

enum class UniverseKind { Naturals, Integers, Rationals, Pairs };

struct UniverseT;
using UniversePtr = std::shared_ptr<const UniverseT>;

struct UniverseT {
  UniverseKind kind;
  UniversePtr first, second;  // components when kind == Pairs
};

inline UniversePtr universe_naturals() {
  static UniversePtr u = std::make_shared<UniverseT>(
      UniverseT{UniverseKind::Naturals, nullptr, nullptr});
  return u;
}

inline UniversePtr universe_integers() {
  static UniversePtr u = std::make_shared<UniverseT>(
      UniverseT{UniverseKind::Integers, nullptr, nullptr});
  return u;
}

inline UniversePtr universe_rationals() {
  static UniversePtr u = std::make_shared<UniverseT>(
      UniverseT{UniverseKind::Rationals, nullptr, nullptr});
  return u;
}

inline UniversePtr universe_pair(UniversePtr a, UniversePtr b) {
  return std::make_shared<UniverseT>(
      UniverseT{UniverseKind::Pairs, std::move(a), std::move(b)});
}

inline bool same_universe(const UniversePtr& a, const UniversePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->kind != UniverseKind::Pairs) return true;
  return same_universe(a->first, b->first) &&
         same_universe(a->second, b->second);
}

inline std::string to_string(const UniversePtr& u) {
  if (!u) return "?";
  switch (u->kind) {
    case UniverseKind::Naturals: return "naturals";
    case UniverseKind::Integers: return "integers";
    case UniverseKind::Rationals: return "rationals";
    case UniverseKind::Pairs:
      return "pairs(" + to_string(u->first) + ", " + to_string(u->second) + ")";
  }
  return "?";
}

// ---- elements ---------------------------------------------------------------

// Rational element in mixed-fraction form: sign * (whole + num/den) with
// 0 <= num < den and gcd(num, den) = 1. The sign tag distinguishes the three
// zero-like elements of the rational universe: the bare zero (sign 0) plus a
// signed zero in each of the positive and negative copies.
struct RatValue {
  int sign = 0;  // -1, 0, +1
  Count whole = 0;
  Count num = 0;
  Count den = 1;
};

struct Element;
using ElementPtr = std::shared_ptr<const Element>;

struct PairVal {
  ElementPtr first, second;
};

struct Element {
  std::variant<Count, std::int64_t, RatValue, PairVal> v;

  bool is_nat() const { return std::holds_alternative<Count>(v); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_rat() const { return std::holds_alternative<RatValue>(v); }
  bool is_pair() const { return std::holds_alternative<PairVal>(v); }

  Count nat() const { return std::get<Count>(v); }
  std::int64_t integer() const { return std::get<std::int64_t>(v); }
  const RatValue& rat() const { return std::get<RatValue>(v); }
  const PairVal& pair() const { return std::get<PairVal>(v); }
};

inline Element make_nat(Count k) { return Element{k}; }
inline Element make_int(std::int64_t z) { return Element{z}; }

inline Element make_rat(int sign, Count whole, Count num, Count den) {
  if (den == 0) throw TypeError("zero denominator");
  if (num >= den) {
    whole += num / den;
    num %= den;
  }
  Count g = std::gcd(num, den);
  if (g > 1) { num /= g; den /= g; }
  if (num == 0) den = 1;
  if (sign == 0 && (whole != 0 || num != 0))
    throw std::logic_error("nonzero magnitude with zero sign tag");
  return Element{RatValue{sign, whole, num, den}};
}

inline Element make_pair(Element a, Element b) {
  return Element{PairVal{std::make_shared<Element>(std::move(a)),
                         std::make_shared<Element>(std::move(b))}};
}

namespace detail {

// signed numeric comparison of rationals; -1/0/+1
inline int rat_value_cmp(const RatValue& a, const RatValue& b) {
  auto mag_zero = [](const RatValue& r) { return r.whole == 0 && r.num == 0; };
  int va = (a.sign == 0 || mag_zero(a)) ? 0 : a.sign;
  int vb = (b.sign == 0 || mag_zero(b)) ? 0 : b.sign;
  if (va != vb) return va < vb ? -1 : 1;
  if (va == 0) return 0;
  // same nonzero sign: compare magnitudes with 128-bit cross products
  unsigned __int128 lhs =
      (static_cast<unsigned __int128>(a.whole) * a.den + a.num) * b.den;
  unsigned __int128 rhs =
      (static_cast<unsigned __int128>(b.whole) * b.den + b.num) * a.den;
  if (lhs == rhs) return 0;
  int m = lhs < rhs ? -1 : 1;
  return va > 0 ? m : -m;
}

}  // namespace detail

inline int compare_elements(const Element& a, const Element& b);

inline int compare_rat(const RatValue& a, const RatValue& b) {
  int c = detail::rat_value_cmp(a, b);
  if (c != 0) return c;
  // equal numeric value: order the tags neg < zero < pos
  if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
  return 0;
}

inline int compare_elements(const Element& a, const Element& b) {
  if (a.v.index() != b.v.index())
    return a.v.index() < b.v.index() ? -1 : 1;
  if (a.is_nat())
    return a.nat() == b.nat() ? 0 : (a.nat() < b.nat() ? -1 : 1);
  if (a.is_int())
    return a.integer() == b.integer() ? 0
                                      : (a.integer() < b.integer() ? -1 : 1);
  if (a.is_rat()) return compare_rat(a.rat(), b.rat());
  int c = compare_elements(*a.pair().first, *b.pair().first);
  if (c != 0) return c;
  return compare_elements(*a.pair().second, *b.pair().second);
}

inline bool operator==(const Element& a, const Element& b) {
  return compare_elements(a, b) == 0;
}

inline bool operator<(const Element& a, const Element& b) {
  return compare_elements(a, b) < 0;
}

inline std::string to_string(const Element& e) {
  if (e.is_nat()) return std::to_string(e.nat());
  if (e.is_int()) return std::to_string(e.integer());
  if (e.is_rat()) {
    const RatValue& r = e.rat();
    if (r.sign == 0) return "0";
    if (r.whole == 0 && r.num == 0) return r.sign > 0 ? "+0" : "-0";
    std::string s = r.sign < 0 ? "-" : "";
    if (r.num == 0) return s + std::to_string(r.whole);
    if (r.whole == 0) return s + std::to_string(r.num) + "/" +
                             std::to_string(r.den);
    return s + std::to_string(r.whole) + "+" + std::to_string(r.num) + "/" +
           std::to_string(r.den);
  }
  return "(" + to_string(*e.pair().first) + ", " +
         to_string(*e.pair().second) + ")";
}

// Universe of a fully-typed element (literals are coerced before this).
inline UniversePtr element_universe(const Element& e) {
  if (e.is_nat()) return universe_naturals();
  if (e.is_int()) return universe_integers();
  if (e.is_rat()) return universe_rationals();
  return universe_pair(element_universe(*e.pair().first),
                       element_universe(*e.pair().second));
}

// Coerce a parsed literal element into a target universe.
inline Element coerce(const Element& e, const UniversePtr& u) {
  switch (u->kind) {
    case UniverseKind::Naturals:
      if (e.is_nat()) return e;
      if (e.is_int() && e.integer() >= 1)
        return make_nat(static_cast<Count>(e.integer()));
      throw TypeError("element " + to_string(e) +
                      " does not fit universe naturals");
    case UniverseKind::Integers:
      if (e.is_int()) return e;
      if (e.is_nat()) return make_int(static_cast<std::int64_t>(e.nat()));
      throw TypeError("element " + to_string(e) +
                      " does not fit universe integers");
    case UniverseKind::Rationals: {
      if (e.is_rat()) return e;
      std::int64_t z = 0;
      if (e.is_int()) z = e.integer();
      else if (e.is_nat()) z = static_cast<std::int64_t>(e.nat());
      else
        throw TypeError("element " + to_string(e) +
                        " does not fit universe rationals");
      if (z == 0) return make_rat(0, 0, 0, 1);
      return make_rat(z > 0 ? 1 : -1,
                      static_cast<Count>(z > 0 ? z : -z), 0, 1);
    }
    case UniverseKind::Pairs:
      if (!e.is_pair())
        throw TypeError("element " + to_string(e) +
                        " does not fit universe " + to_string(u));
      return make_pair(coerce(*e.pair().first, u->first),
                       coerce(*e.pair().second, u->second));
  }
  throw TypeError("unknown universe");
}

}  // namespace sizeseq
