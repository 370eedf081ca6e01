#pragma once

// Independent counting oracle. Everything here recomputes labels and
// memberships from first principles (trial division, gcd scans, explicit
// mixed-fraction generation) so that its partial counts can cross-check the
// formula-driven sequences. It deliberately shares only the element and
// expression vocabulary with the main implementation, never its sieves or
// size formulas.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sizeseq/checked.hpp"
#include "sizeseq/element.hpp"
#include "sizeseq/expr.hpp"

namespace sizeseq::oracle {

inline constexpr std::uint64_t kDefaultInventoryLimit = 1'000'000;

struct LabelledInventory {
  Index bound = 0;
  std::vector<std::pair<Element, Index>> entries;  // sorted by (label, element)
};

namespace detail {

struct Budget {
  std::uint64_t limit;
  std::uint64_t used = 0;
  void spend() {
    if (++used > limit)
      throw ResourceError("oracle inventory exceeds " + std::to_string(limit) +
                          " elements");
  }
};

inline bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

using InvMap = std::map<Element, Index>;

// every reduced positive rational value with label <= bound, including the
// positive zero copy; label(p + m/n) = max(p, n), label(0) = 1
inline std::vector<RatValue> positive_rational_values(Index bound,
                                                      Budget& bgt) {
  std::vector<RatValue> out;
  auto push = [&](RatValue r) {
    bgt.spend();
    out.push_back(r);
  };
  push(RatValue{1, 0, 0, 1});
  for (Count d = 1; d <= bound; ++d) {
    for (Count m = 0; m < std::max<Count>(d, 1); ++m) {
      if (m == 0 && d != 1) continue;
      if (m != 0 && std::gcd(m, d) != 1) continue;
      Count w0 = (m == 0 && d == 1) ? 1 : 0;
      for (Count w = w0; std::max<Count>(w, d) <= bound; ++w)
        push(RatValue{1, w, m, d});
    }
  }
  return out;
}

inline Index rat_label(const RatValue& r) {
  return std::max<Index>(std::max<Index>(r.whole, r.den), 1);
}

inline void add_entry(InvMap& m, Budget& bgt, Element e, Index label) {
  auto [it, inserted] = m.emplace(std::move(e), label);
  if (inserted)
    bgt.spend();
  else if (it->second != label)
    throw TypeError("oracle label conflict at " + to_string(it->first));
}

inline InvMap enum_atom(AtomKind a, std::uint64_t param, Index bound,
                        Budget& bgt) {
  InvMap m;
  switch (a) {
    case AtomKind::N:
      for (Count x = 1; x <= bound; ++x) add_entry(m, bgt, make_nat(x), x);
      break;
    case AtomKind::E:
      for (Count x = 2; x <= bound; x += 2) add_entry(m, bgt, make_nat(x), x);
      break;
    case AtomKind::O:
      for (Count x = 1; x <= bound; x += 2) add_entry(m, bgt, make_nat(x), x);
      break;
    case AtomKind::P:
      add_entry(m, bgt, make_nat(1), 1);
      for (Count x = 2; x <= bound; ++x)
        if (trial_prime(x)) add_entry(m, bgt, make_nat(x), x);
      break;
    case AtomKind::M:
      if (param == 0) throw TypeError("M(0) is not a valid atom");
      for (Count x = param; x <= bound; x += param)
        add_entry(m, bgt, make_nat(x), x);
      break;
    case AtomKind::S:
      if (param == 0) throw TypeError("S(0) is not a valid atom");
      for (Count j = 1;; ++j) {
        Count acc = 1;
        bool over = false;
        for (std::uint64_t i = 0; i < param; ++i) {
          if (j != 0 && acc > bound / j) {
            over = true;
            break;
          }
          acc *= j;
        }
        if (over || acc > bound) break;
        add_entry(m, bgt, make_nat(acc), acc);
      }
      break;
    case AtomKind::N0:
      add_entry(m, bgt, make_int(0), 1);
      for (Count x = 1; x <= bound; ++x)
        add_entry(m, bgt, make_int(static_cast<std::int64_t>(x)), x);
      break;
    case AtomKind::Z:
      add_entry(m, bgt, make_int(0), 1);
      for (Count x = 1; x <= bound; ++x) {
        auto z = static_cast<std::int64_t>(x);
        add_entry(m, bgt, make_int(z), x);
        add_entry(m, bgt, make_int(-z), x);
      }
      break;
    case AtomKind::Qpos:
      for (const RatValue& r : positive_rational_values(bound, bgt))
        add_entry(m, bgt, Element{r}, rat_label(r));
      break;
    case AtomKind::I:
      for (const RatValue& r : positive_rational_values(bound, bgt))
        if ((r.whole == 0 && r.num > 0) || (r.whole == 1 && r.num == 0))
          add_entry(m, bgt, Element{r}, rat_label(r));
      break;
    case AtomKind::Q: {
      add_entry(m, bgt, Element{RatValue{0, 0, 0, 1}}, 1);
      for (const RatValue& r : positive_rational_values(bound, bgt)) {
        add_entry(m, bgt, Element{r}, rat_label(r));
        add_entry(m, bgt, Element{RatValue{-1, r.whole, r.num, r.den}},
                  rat_label(r));
      }
      break;
    }
  }
  return m;
}

inline Index literal_label(const UniversePtr& u, const Element& x) {
  switch (u->kind) {
    case UniverseKind::Naturals:
      return x.nat();
    case UniverseKind::Integers: {
      std::int64_t z = x.integer();
      return z == 0 ? 1 : static_cast<Index>(z < 0 ? -z : z);
    }
    case UniverseKind::Rationals:
      return rat_label(x.rat());
    case UniverseKind::Pairs:
      return std::max(literal_label(u->first, *x.pair().first),
                      literal_label(u->second, *x.pair().second));
  }
  throw TypeError("unknown universe");
}

inline InvMap enum_expr(const SetExprPtr& e, const UniversePtr& u, Index bound,
                        Budget& bgt) {
  switch (e->kind) {
    case SetExpr::Kind::Atom:
      return enum_atom(e->atom, e->param, bound, bgt);
    case SetExpr::Kind::Literal: {
      InvMap m;
      for (const Element& raw : e->literal) {
        Element x = coerce(raw, u);
        Index l = literal_label(u, x);
        if (l <= bound) add_entry(m, bgt, x, l);
      }
      return m;
    }
    case SetExpr::Kind::Product: {
      InvMap la = enum_expr(e->lhs, u->first, bound, bgt);
      InvMap lb = enum_expr(e->rhs, u->second, bound, bgt);
      InvMap m;
      for (const auto& [x, lx] : la)
        for (const auto& [y, ly] : lb) {
          Index l = std::max(lx, ly);
          if (l <= bound) add_entry(m, bgt, make_pair(x, y), l);
        }
      return m;
    }
    default: {
      InvMap la = enum_expr(e->lhs, u, bound, bgt);
      InvMap lb = enum_expr(e->rhs, u, bound, bgt);
      if (e->kind == SetExpr::Kind::Union) {
        for (const auto& [x, l] : lb) add_entry(la, bgt, x, l);
        return la;
      }
      InvMap m;
      for (const auto& [x, l] : la) {
        bool in_b = lb.count(x) != 0;
        if (e->kind == SetExpr::Kind::Inter ? in_b : !in_b)
          add_entry(m, bgt, x, l);
      }
      return m;
    }
  }
}

}  // namespace detail

inline LabelledInventory enumerate(
    const SetExprPtr& e, Index bound,
    std::uint64_t limit = kDefaultInventoryLimit) {
  detail::Budget bgt{limit};
  UniversePtr u = resolve_default(infer_universe(*e));
  detail::InvMap m = detail::enum_expr(e, u, bound, bgt);
  LabelledInventory inv;
  inv.bound = bound;
  inv.entries.reserve(m.size());
  for (const auto& [x, l] : m) inv.entries.emplace_back(x, l);
  std::stable_sort(inv.entries.begin(), inv.entries.end(),
                   [](const auto& p, const auto& q) {
                     if (p.second != q.second) return p.second < q.second;
                     return p.first < q.first;
                   });
  return inv;
}

// Euler phi by definition: count of m in [1, n] with gcd(m, n) = 1.
inline Count totient_by_gcd(Index n) {
  Count c = 0;
  for (Index m = 1; m <= n; ++m)
    if (std::gcd(m, n) == 1) ++c;
  return c;
}

// Partial counts derived from the inventory: sigma[n-1] = #{x : label(x) <= n}.
inline std::vector<Count> brute_sigma(
    const SetExprPtr& e, Index bound,
    std::uint64_t limit = kDefaultInventoryLimit) {
  LabelledInventory inv = enumerate(e, bound, limit);
  std::vector<Count> sigma(bound, 0);
  for (const auto& [x, l] : inv.entries) sigma[l - 1] += 1;
  Count acc = 0;
  for (Index n = 0; n < bound; ++n) {
    acc = checked_add(acc, sigma[n], n + 1, "oracle partial sum");
    sigma[n] = acc;
  }
  return sigma;
}

}  // namespace sizeseq::oracle
