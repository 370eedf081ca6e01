#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sizeseq/compare.hpp"
#include "sizeseq/element.hpp"
#include "sizeseq/envelope.hpp"
#include "sizeseq/expr.hpp"
#include "sizeseq/sequence.hpp"
#include "sizeseq/sieves.hpp"

namespace sizeseq {

// Canonical label of an element in its universe: the value itself for
// naturals, max(|z|, 1) for integers, max(whole, den) for rationals (so every
// zero-like element lands in block 1), max of components for pairs.
inline Index canonical_label(const UniversePtr& u, const Element& x) {
  switch (u->kind) {
    case UniverseKind::Naturals:
      return x.nat();
    case UniverseKind::Integers: {
      std::int64_t z = x.integer();
      if (z == 0) return 1;
      return static_cast<Index>(z < 0 ? -z : z);
    }
    case UniverseKind::Rationals: {
      const RatValue& r = x.rat();
      return std::max<Index>(std::max<Index>(r.whole, r.den), 1);
    }
    case UniverseKind::Pairs:
      return std::max(canonical_label(u->first, *x.pair().first),
                      canonical_label(u->second, *x.pair().second));
  }
  throw TypeError("unknown universe");
}

inline Count kth_root(Count n, std::uint64_t k) {
  if (k == 1 || n <= 1) return n;
  if (k >= 64) return 1;
  auto pow_le = [&](Count x) {  // x^k <= n without overflow
    Count acc = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
      if (x != 0 && acc > n / x) return false;
      acc *= x;
    }
    return acc <= n;
  };
  Count r = static_cast<Count>(
      std::pow(static_cast<long double>(n), 1.0L / static_cast<long double>(k)));
  r = std::max<Count>(r, 1);
  while (r > 1 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

// ---- set implementation core ------------------------------------------------

class CalculableSet;

struct SetImpl {
  UniversePtr universe;
  std::string name;
  bool canonical = true;

  virtual ~SetImpl() = default;
  virtual bool contains(const Element& x) const = 0;
  virtual std::vector<Element> block(Index n) const = 0;
  virtual Count chi(Index n) const {
    return static_cast<Count>(block(n).size());
  }
  virtual Index label_of(const Element& x) const {
    if (!contains(x))
      throw NotAMemberError(to_string(x) + " is not in " + name);
    return canonical_label(universe, x);
  }
  virtual SizeSequence size(const std::shared_ptr<const SetImpl>& self) const {
    auto s = self;
    return SizeSequence::from_characteristic(
        IntSequence([s](Index n) { return s->chi(n); }), "sigma(" + name + ")");
  }
};

using SetImplPtr = std::shared_ptr<const SetImpl>;

class CalculableSet {
 public:
  CalculableSet() = default;
  explicit CalculableSet(SetImplPtr impl) : impl_(std::move(impl)) {}

  const UniversePtr& universe() const { return impl_->universe; }
  const std::string& name() const { return impl_->name; }
  bool canonical() const { return impl_->canonical; }
  bool contains(const Element& x) const { return impl_->contains(x); }
  Index label_of(const Element& x) const { return impl_->label_of(x); }
  std::vector<Element> block(Index n) const { return impl_->block(n); }

  IntSequence characteristic() const {
    auto impl = impl_;
    return IntSequence([impl](Index n) { return impl->chi(n); });
  }

  SizeSequence size() const { return impl_->size(impl_); }

  const SetImplPtr& impl() const { return impl_; }

 private:
  SetImplPtr impl_;
};

// ---- registered analytic facts ----------------------------------------------

// Envelope facts that go beyond what polynomial manipulation yields. Each is
// audited pointwise up to the audit bound the first time it is attached; the
// tail beyond the audit bound is the registered analytic content.
inline constexpr Index kDefaultAuditBound = 100'000;

namespace detail {

template <class Eval>
void attach_audited(const std::string& key, const EnvelopeCertificate& cert,
                    Eval&& eval, Index audit_to = kDefaultAuditBound) {
  static std::mutex mu;
  static std::set<std::string> done;
  {
    std::lock_guard<std::mutex> lk(mu);
    if (done.count(key)) return;
  }
  if (auto bad = audit_envelope(cert, eval, cert.threshold, audit_to))
    throw std::logic_error("registered envelope " + key +
                           " fails its audit at n=" + std::to_string(*bad));
  std::lock_guard<std::mutex> lk(mu);
  done.insert(key);
}

}  // namespace detail

// ---- concrete implementations ----------------------------------------------

namespace detail {

struct PredicateSubset : SetImpl {
  // naturals or integers universe; membership on the canonical candidates
  std::function<bool(std::int64_t)> member;
  std::function<Count(Index)> sigma;  // optional direct evaluation
  std::optional<QuasiPolynomial> sym;
  std::optional<EnvelopeCertificate> env;

  std::vector<std::int64_t> candidates(Index n) const {
    if (universe->kind == UniverseKind::Naturals)
      return {static_cast<std::int64_t>(n)};
    auto z = static_cast<std::int64_t>(n);
    if (n == 1) return {-1, 0, 1};
    return {-z, z};
  }

  bool contains(const Element& x) const override {
    if (universe->kind == UniverseKind::Naturals)
      return x.is_nat() && member(static_cast<std::int64_t>(x.nat()));
    return x.is_int() && member(x.integer());
  }

  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    for (std::int64_t z : candidates(n))
      if (member(z)) {
        if (universe->kind == UniverseKind::Naturals)
          out.push_back(make_nat(static_cast<Count>(z)));
        else
          out.push_back(make_int(z));
      }
    return out;
  }

  Count chi(Index n) const override {
    Count c = 0;
    for (std::int64_t z : candidates(n))
      if (member(z)) ++c;
    return c;
  }

  SizeSequence size(const SetImplPtr& self) const override {
    auto s = std::static_pointer_cast<const PredicateSubset>(self);
    std::string tag = "sigma(" + name + ")";
    if (sigma)
      return SizeSequence::from_eval(sigma, tag, sym, env);
    SizeSequence base = SizeSequence::from_characteristic(
        IntSequence([s](Index n) { return s->chi(n); }), tag);
    if (sym) base = base.with_symbolic(*sym);
    if (env) base = base.with_envelope(*env);
    return base;
  }
};

struct RationalsSubset : SetImpl {
  std::function<bool(const RatValue&)> member;
  std::function<Count(Index)> sigma;
  std::function<Count(Index)> chi_direct;
  std::optional<EnvelopeCertificate> env;

  // every positive-copy element with label n, unsorted
  static void pos_frame(Index n, std::vector<RatValue>& out) {
    if (n == 1) {
      out.push_back(RatValue{1, 0, 0, 1});  // +0
      out.push_back(RatValue{1, 1, 0, 1});  // 1
      return;
    }
    // denominator = n: any whole part 0..n, coprime numerator
    for (Count m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      for (Count p = 0; p <= n; ++p)
        out.push_back(RatValue{1, p, m, static_cast<Count>(n)});
    }
    // whole part = n: denominators below n
    out.push_back(RatValue{1, static_cast<Count>(n), 0, 1});
    for (Count d = 2; d < n; ++d)
      for (Count m = 1; m < d; ++m)
        if (std::gcd(m, d) == 1)
          out.push_back(RatValue{1, static_cast<Count>(n), m, d});
  }

  bool contains(const Element& x) const override {
    return x.is_rat() && member(x.rat());
  }

  std::vector<Element> block(Index n) const override {
    std::vector<RatValue> frame;
    pos_frame(n, frame);
    std::vector<Element> out;
    for (const RatValue& r : frame) {
      RatValue neg{-1, r.whole, r.num, r.den};
      if (member(neg)) out.push_back(Element{neg});
    }
    if (n == 1) {
      RatValue zero{0, 0, 0, 1};
      if (member(zero)) out.push_back(Element{zero});
    }
    for (const RatValue& r : frame)
      if (member(r)) out.push_back(Element{r});
    std::sort(out.begin(), out.end());
    return out;
  }

  Count chi(Index n) const override {
    if (chi_direct) return chi_direct(n);
    return static_cast<Count>(block(n).size());
  }

  SizeSequence size(const SetImplPtr& self) const override {
    auto s = std::static_pointer_cast<const RationalsSubset>(self);
    std::string tag = "sigma(" + name + ")";
    if (sigma) return SizeSequence::from_eval(sigma, tag, std::nullopt, env);
    SizeSequence base = SizeSequence::from_characteristic(
        IntSequence([s](Index n) { return s->chi(n); }), tag);
    if (env) base = base.with_envelope(*env);
    return base;
  }
};

struct LiteralSet : SetImpl {
  std::vector<Element> members;      // sorted, unique, coerced
  std::vector<Index> sorted_labels;  // ascending

  bool contains(const Element& x) const override {
    return std::binary_search(members.begin(), members.end(), x);
  }

  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    for (const Element& x : members)
      if (canonical_label(universe, x) == n) out.push_back(x);
    return out;
  }

  Count chi(Index n) const override {
    Count c = 0;
    for (Index l : sorted_labels)
      if (l == n) ++c;
    return c;
  }

  Count sigma_at(Index n) const {
    return static_cast<Count>(
        std::upper_bound(sorted_labels.begin(), sorted_labels.end(), n) -
        sorted_labels.begin());
  }

  SizeSequence size(const SetImplPtr& self) const override {
    auto s = std::static_pointer_cast<const LiteralSet>(self);
    Index maxl = sorted_labels.empty() ? 0 : sorted_labels.back();
    auto total = static_cast<Count>(members.size());
    auto qp = QuasiPolynomial::constant(total).with_threshold(maxl + 1);
    std::optional<EnvelopeCertificate> env;
    if (total > 0)
      env = EnvelopeCertificate{{BigRat(total), BigRat(0), 0},
                                {BigRat(total), BigRat(0), 0}, maxl + 1};
    return SizeSequence::from_eval([s](Index n) { return s->sigma_at(n); },
                                   "sigma(" + name + ")", qp, env);
  }
};

struct BinaryCombo : SetImpl {
  CalculableSet a, b;
  SetExpr::Kind op = SetExpr::Kind::Union;

  bool contains(const Element& x) const override {
    switch (op) {
      case SetExpr::Kind::Union: return a.contains(x) || b.contains(x);
      case SetExpr::Kind::Inter: return a.contains(x) && b.contains(x);
      default: return a.contains(x) && !b.contains(x);
    }
  }

  // Blocks keep the left operand's presentation order; for a union the right
  // operand's new members follow. Scalar blocks are ascending on both sides,
  // so the scalar union re-sorts to stay ascending; product blocks keep the
  // frame walk.
  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    switch (op) {
      case SetExpr::Kind::Union: {
        out = a.block(n);
        for (const Element& x : b.block(n))
          if (!a.contains(x)) out.push_back(x);
        if (universe->kind != UniverseKind::Pairs)
          std::sort(out.begin(), out.end());
        break;
      }
      case SetExpr::Kind::Inter:
        for (const Element& x : a.block(n))
          if (b.contains(x)) out.push_back(x);
        break;
      default:
        for (const Element& x : a.block(n))
          if (!b.contains(x)) out.push_back(x);
        break;
    }
    return out;
  }
};

// A minus F for finite F: sizes come from A's by subtracting label counts.
struct MinusFinite : SetImpl {
  CalculableSet a;
  std::vector<Element> removed;       // members of A, sorted
  std::vector<Index> removed_labels;  // ascending

  bool contains(const Element& x) const override {
    return a.contains(x) &&
           !std::binary_search(removed.begin(), removed.end(), x);
  }

  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    for (const Element& x : a.block(n))
      if (!std::binary_search(removed.begin(), removed.end(), x))
        out.push_back(x);
    return out;
  }

  Count removed_leq(Index n) const {
    return static_cast<Count>(
        std::upper_bound(removed_labels.begin(), removed_labels.end(), n) -
        removed_labels.begin());
  }

  Count chi(Index n) const override {
    auto rng = std::equal_range(removed_labels.begin(), removed_labels.end(), n);
    return a.characteristic()(n) - static_cast<Count>(rng.second - rng.first);
  }

  SizeSequence size(const SetImplPtr& self) const override {
    auto s = std::static_pointer_cast<const MinusFinite>(self);
    SizeSequence base = a.size();
    Index maxl = removed_labels.empty() ? 0 : removed_labels.back();
    auto total = static_cast<Count>(removed.size());
    std::optional<QuasiPolynomial> sym;
    if (base.symbolic())
      sym = qp_sub(*base.symbolic(),
                   QuasiPolynomial::constant(total).with_threshold(maxl + 1));
    return SizeSequence::from_eval(
        [s, base](Index n) { return base(n) - s->removed_leq(n); },
        "sigma(" + name + ")", std::move(sym));
  }
};

struct ProductSet : SetImpl {
  CalculableSet a, b;
  SizeSequence sa, sb;  // cached operand sizes, set at construction

  bool contains(const Element& x) const override {
    return x.is_pair() && a.contains(*x.pair().first) &&
           b.contains(*x.pair().second);
  }

  Index label_of(const Element& x) const override {
    if (!x.is_pair())
      throw NotAMemberError(to_string(x) + " is not in " + name);
    return std::max(a.label_of(*x.pair().first),
                    b.label_of(*x.pair().second));
  }

  // Frame walk: right edge top-to-bottom (first component fixed at label n),
  // then bottom edge right-to-left (second component at label n).
  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    std::vector<Element> an = a.block(n);
    for (Index j = 1; j <= n; ++j) {
      std::vector<Element> bj = b.block(j);
      for (const Element& x : an)
        for (const Element& y : bj) out.push_back(make_pair(x, y));
    }
    std::vector<Element> bn = b.block(n);
    for (Index i = n; i-- > 1;) {
      std::vector<Element> ai = a.block(i);
      for (auto it = ai.rbegin(); it != ai.rend(); ++it)
        for (const Element& y : bn) out.push_back(make_pair(*it, y));
    }
    return out;
  }

  Count chi(Index n) const override {
    Count cur = checked_mul(sa(n), sb(n), n, "frame");
    Count prev = n > 1 ? checked_mul(sa(n - 1), sb(n - 1), n, "frame") : 0;
    return cur - prev;
  }

  SizeSequence size(const SetImplPtr&) const override {
    return mul(sa, sb).renamed("sigma(" + name + ")");
  }
};

struct ProductSubset : SetImpl {
  CalculableSet parent;  // a ProductSet-backed set
  std::function<bool(const Element&, const Element&)> pred;

  bool contains(const Element& x) const override {
    return parent.contains(x) && pred(*x.pair().first, *x.pair().second);
  }

  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    for (const Element& x : parent.block(n))
      if (pred(*x.pair().first, *x.pair().second)) out.push_back(x);
    return out;
  }
};

struct FamilyUnion : SetImpl {
  std::function<CalculableSet(Index)> gen;
  static constexpr Index kSearchBound = 4096;

  // members of gen(i) with family label exactly n, i.e. max(i, inner) = n
  std::vector<Element> block(Index n) const override {
    std::vector<Element> out;
    std::set<Element> seen;
    // an element already present in an earlier family member would have been
    // counted there (with a label no larger than this one), so any recurrence
    // breaks disjointness even when the two labels differ
    auto push_checked = [&](const Element& x, Index from) {
      bool dup = !seen.insert(x).second;
      for (Index i = 1; !dup && i < from; ++i) dup = gen(i).contains(x);
      if (dup)
        throw TypeError("family members overlap at element " + to_string(x));
      out.push_back(x);
    };
    for (Index i = 1; i < n; ++i)
      for (const Element& x : gen(i).block(n)) push_checked(x, i);
    CalculableSet an = gen(n);
    for (Index j = 1; j <= n; ++j)
      for (const Element& x : an.block(j)) push_checked(x, n);
    return out;
  }

  bool contains(const Element& x) const override {
    for (Index i = 1; i <= kSearchBound; ++i)
      if (gen(i).contains(x)) return true;
    return false;
  }

  Index label_of(const Element& x) const override {
    for (Index i = 1; i <= kSearchBound; ++i) {
      CalculableSet ai = gen(i);
      if (ai.contains(x)) return std::max(i, ai.label_of(x));
    }
    throw NotAMemberError(to_string(x) + " is not in " + name);
  }
};

}  // namespace detail

// ---- catalog ----------------------------------------------------------------

namespace detail {

inline CalculableSet make_predicate_set(
    UniversePtr u, std::string name, std::function<bool(std::int64_t)> member,
    std::function<Count(Index)> sigma, std::optional<QuasiPolynomial> sym,
    std::optional<EnvelopeCertificate> env = {}) {
  auto impl = std::make_shared<PredicateSubset>();
  impl->universe = std::move(u);
  impl->name = std::move(name);
  impl->member = std::move(member);
  impl->sigma = std::move(sigma);
  impl->sym = std::move(sym);
  if (env && impl->sigma)
    attach_audited(impl->name + "-envelope", *env,
                   [&](Index n) { return impl->sigma(n); });
  impl->env = std::move(env);
  return CalculableSet(impl);
}

}  // namespace detail

inline CalculableSet set_naturals() {
  return detail::make_predicate_set(
      universe_naturals(), "N", [](std::int64_t) { return true; },
      [](Index n) { return Count{n}; }, QuasiPolynomial::affine(1, 0));
}

inline CalculableSet set_evens() {
  return detail::make_predicate_set(
      universe_naturals(), "E", [](std::int64_t z) { return z % 2 == 0; },
      [](Index n) { return Count{n / 2}; }, QuasiPolynomial::floor_div(2));
}

inline CalculableSet set_odds() {
  return detail::make_predicate_set(
      universe_naturals(), "O", [](std::int64_t z) { return z % 2 == 1; },
      [](Index n) { return Count{(n + 1) / 2}; }, QuasiPolynomial::ceil_div(2));
}

inline CalculableSet set_multiples(std::uint64_t k) {
  if (k == 0) throw TypeError("M(0) is not a valid atom");
  EnvelopeCertificate env{{BigRat(1) / BigRat(k + 1), BigRat(1), 0},
                          {BigRat(1) / BigRat(k), BigRat(1), 0},
                          std::max<Index>(1, k * k)};
  return detail::make_predicate_set(
      universe_naturals(), "M(" + std::to_string(k) + ")",
      [k](std::int64_t z) { return z % static_cast<std::int64_t>(k) == 0; },
      [k](Index n) { return Count{n / k}; }, QuasiPolynomial::floor_div(k),
      env);
}

inline CalculableSet set_powers(std::uint64_t k) {
  if (k == 0) throw TypeError("S(0) is not a valid atom");
  std::optional<EnvelopeCertificate> env;
  if (k <= 40)
    env = EnvelopeCertificate{
        {BigRat(1) / 2, BigRat(1) / BigRat(k), 0},
        {BigRat(1), BigRat(1) / BigRat(k), 0},
        Index{1} << k};
  return detail::make_predicate_set(
      universe_naturals(), "S(" + std::to_string(k) + ")",
      [k](std::int64_t z) {
        Count c = static_cast<Count>(z);
        Count r = kth_root(c, k);
        Count acc = 1;
        for (std::uint64_t i = 0; i < k && acc <= c; ++i) acc *= r;
        return acc == c;
      },
      [k](Index n) { return kth_root(n, k); }, std::nullopt, env);
}

// The primes atom of the catalog counts 1 in its first block, matching the
// printed size prefix (1,2,3,3,4,4,...); sigma is therefore pi(n)+1.
// Envelope: n/ln n <= sigma(n) <= (63/50) n/ln n. The lower bound already
// holds from 11, but the upper constant is sharp only from 127 (the ratio
// peaks at 1.3947... at n = 19), so the joint certificate starts at 127.
inline CalculableSet set_primes() {
  EnvelopeCertificate env{{BigRat(1), BigRat(1), -1},
                          {BigRat(63) / 50, BigRat(1), -1}, 127};
  return detail::make_predicate_set(
      universe_naturals(), "P",
      [](std::int64_t z) { return z == 1 || is_prime(static_cast<Index>(z)); },
      [](Index n) -> Count { return prime_pi(n) + 1; }, std::nullopt, env);
}

inline CalculableSet set_integers() {
  return detail::make_predicate_set(
      universe_integers(), "Z", [](std::int64_t) { return true; },
      [](Index n) { return checked_add(checked_mul(2, n, n), 1, n); },
      QuasiPolynomial::affine(2, 1));
}

inline CalculableSet set_naturals_with_zero() {
  return detail::make_predicate_set(
      universe_integers(), "N0", [](std::int64_t z) { return z >= 0; },
      [](Index n) { return checked_add(n, 1, n); },
      QuasiPolynomial::affine(1, 1));
}

namespace detail {

inline CalculableSet make_rational_set(
    std::string name, std::function<bool(const RatValue&)> member,
    std::function<Count(Index)> sigma, std::function<Count(Index)> chi,
    std::optional<EnvelopeCertificate> env) {
  auto impl = std::make_shared<RationalsSubset>();
  impl->universe = universe_rationals();
  impl->name = std::move(name);
  impl->member = std::move(member);
  impl->sigma = std::move(sigma);
  impl->chi_direct = std::move(chi);
  if (env && impl->sigma)
    attach_audited(impl->name + "-envelope", *env,
                   [&](Index n) { return impl->sigma(n); });
  impl->env = std::move(env);
  return CalculableSet(impl);
}

}  // namespace detail

// unit-interval rationals (0, 1]
inline CalculableSet set_unit_interval() {
  auto member = [](const RatValue& r) {
    if (r.sign != 1) return false;
    return (r.whole == 0 && r.num > 0) || (r.whole == 1 && r.num == 0);
  };
  return detail::make_rational_set(
      "I", member, [](Index n) { return totient_sum(n); },
      [](Index n) { return totient(n); },
      EnvelopeCertificate{{BigRat(1) / 4, BigRat(2), 0},
                          {BigRat(1) / 2, BigRat(2), 0}, 2});
}

inline Count sigma_qpos(Index n) {
  return checked_mul(checked_add(n, 1, n), totient_sum(n), n, "sigma(Qpos)");
}

inline Count chi_qpos(Index n) {
  Count a = checked_mul(checked_add(n, 1, n), totient(n), n);
  return checked_add(a, totient_sum(n - 1), n);
}

inline CalculableSet set_positive_rationals() {
  return detail::make_rational_set(
      "Qpos", [](const RatValue& r) { return r.sign == 1; }, sigma_qpos,
      chi_qpos,
      EnvelopeCertificate{{BigRat(1) / 4, BigRat(3), 0},
                          {BigRat(1), BigRat(3), 0}, 2});
}

inline CalculableSet set_rationals() {
  return detail::make_rational_set(
      "Q", [](const RatValue&) { return true; },
      [](Index n) {
        return checked_add(checked_mul(2, sigma_qpos(n), n), 1, n);
      },
      [](Index n) {
        Count c = checked_mul(2, chi_qpos(n), n);
        return n == 1 ? c + 1 : c;
      },
      EnvelopeCertificate{{BigRat(1) / 2, BigRat(3), 0},
                          {BigRat(2), BigRat(3), 0}, 2});
}

inline CalculableSet make_literal_set(std::vector<Element> members,
                                      const UniversePtr& u) {
  auto impl = std::make_shared<detail::LiteralSet>();
  impl->universe = u;
  std::vector<Element> coerced;
  coerced.reserve(members.size());
  for (const Element& x : members) coerced.push_back(coerce(x, u));
  std::sort(coerced.begin(), coerced.end());
  coerced.erase(std::unique(coerced.begin(), coerced.end()), coerced.end());
  impl->members = std::move(coerced);
  for (const Element& x : impl->members)
    impl->sorted_labels.push_back(canonical_label(u, x));
  std::sort(impl->sorted_labels.begin(), impl->sorted_labels.end());
  std::string nm = "{";
  for (std::size_t i = 0; i < impl->members.size(); ++i) {
    if (i) nm += ", ";
    nm += to_string(impl->members[i]);
  }
  impl->name = nm + "}";
  return CalculableSet(impl);
}

// ---- constructions ----------------------------------------------------------

namespace detail {

inline void require_combinable(const CalculableSet& a, const CalculableSet& b,
                               const char* op) {
  if (!same_universe(a.universe(), b.universe()))
    throw TypeError("operands of '" + std::string(op) + "' mix universes " +
                    to_string(a.universe()) + " and " +
                    to_string(b.universe()));
  if (!a.canonical() || !b.canonical())
    throw TypeError("non-canonical combination: '" + std::string(op) +
                    "' requires canonically labelled operands (" +
                    (a.canonical() ? b.name() : a.name()) +
                    " has a custom labelling)");
}

inline CalculableSet make_combo(SetExpr::Kind op, const CalculableSet& a,
                                const CalculableSet& b, const char* opname) {
  require_combinable(a, b, opname);
  auto impl = std::make_shared<BinaryCombo>();
  impl->universe = a.universe();
  impl->a = a;
  impl->b = b;
  impl->op = op;
  impl->name = "(" + a.name() + " " + opname + " " + b.name() + ")";
  return CalculableSet(impl);
}

}  // namespace detail

inline CalculableSet union_sets(const CalculableSet& a, const CalculableSet& b) {
  return detail::make_combo(SetExpr::Kind::Union, a, b, "union");
}

inline CalculableSet inter_sets(const CalculableSet& a, const CalculableSet& b) {
  return detail::make_combo(SetExpr::Kind::Inter, a, b, "inter");
}

inline CalculableSet minus_sets(const CalculableSet& a, const CalculableSet& b) {
  return detail::make_combo(SetExpr::Kind::Minus, a, b, "minus");
}

// A minus an explicit finite part; sizes derived from A's in O(1) per index.
inline CalculableSet minus_finite(const CalculableSet& a,
                                  const std::vector<Element>& part) {
  auto impl = std::make_shared<detail::MinusFinite>();
  impl->universe = a.universe();
  impl->a = a;
  for (const Element& x : part)
    if (a.contains(x)) impl->removed.push_back(x);
  std::sort(impl->removed.begin(), impl->removed.end());
  impl->removed.erase(
      std::unique(impl->removed.begin(), impl->removed.end()),
      impl->removed.end());
  for (const Element& x : impl->removed)
    impl->removed_labels.push_back(a.label_of(x));
  std::sort(impl->removed_labels.begin(), impl->removed_labels.end());
  std::string nm = "(" + a.name() + " minus {";
  for (std::size_t i = 0; i < impl->removed.size(); ++i) {
    if (i) nm += ", ";
    nm += to_string(impl->removed[i]);
  }
  impl->name = nm + "})";
  impl->canonical = a.canonical();
  return CalculableSet(impl);
}

inline CalculableSet product(const CalculableSet& a, const CalculableSet& b) {
  auto impl = std::make_shared<detail::ProductSet>();
  impl->universe = universe_pair(a.universe(), b.universe());
  impl->a = a;
  impl->b = b;
  impl->sa = a.size();
  impl->sb = b.size();
  impl->canonical = a.canonical() && b.canonical();
  impl->name = "(" + a.name() + " x " + b.name() + ")";
  return CalculableSet(impl);
}

inline CalculableSet subset_of_product(
    std::function<bool(const Element&, const Element&)> pred,
    const CalculableSet& a, const CalculableSet& b, std::string name) {
  auto impl = std::make_shared<detail::ProductSubset>();
  impl->parent = product(a, b);
  impl->universe = impl->parent.universe();
  impl->pred = std::move(pred);
  impl->canonical = impl->parent.canonical();
  impl->name = std::move(name);
  return CalculableSet(impl);
}

inline CalculableSet family_union(std::function<CalculableSet(Index)> gen,
                                  std::string name) {
  auto impl = std::make_shared<detail::FamilyUnion>();
  impl->gen = std::move(gen);
  impl->universe = impl->gen(1).universe();
  impl->name = std::move(name);
  return CalculableSet(impl);
}

// Custom labellings for experiments; canonical must be declared explicitly.
inline CalculableSet custom_set(
    UniversePtr u, std::string name, bool canonical,
    std::function<bool(const Element&)> member,
    std::function<Index(const Element&)> label,
    std::function<std::vector<Element>(Index)> block) {
  struct Custom : SetImpl {
    std::function<bool(const Element&)> member;
    std::function<Index(const Element&)> label;
    std::function<std::vector<Element>(Index)> blk;
    bool contains(const Element& x) const override { return member(x); }
    Index label_of(const Element& x) const override {
      if (!member(x))
        throw NotAMemberError(to_string(x) + " is not in " + name);
      return label(x);
    }
    std::vector<Element> block(Index n) const override { return blk(n); }
  };
  auto impl = std::make_shared<Custom>();
  impl->universe = std::move(u);
  impl->name = std::move(name);
  impl->canonical = canonical;
  impl->member = std::move(member);
  impl->label = std::move(label);
  impl->blk = std::move(block);
  return CalculableSet(impl);
}

// ---- building from expressions ----------------------------------------------

inline CalculableSet build_atom(AtomKind a, std::uint64_t param) {
  switch (a) {
    case AtomKind::N: return set_naturals();
    case AtomKind::N0: return set_naturals_with_zero();
    case AtomKind::Z: return set_integers();
    case AtomKind::Q: return set_rationals();
    case AtomKind::Qpos: return set_positive_rationals();
    case AtomKind::I: return set_unit_interval();
    case AtomKind::E: return set_evens();
    case AtomKind::O: return set_odds();
    case AtomKind::P: return set_primes();
    case AtomKind::M: return set_multiples(param);
    case AtomKind::S: return set_powers(param);
  }
  throw TypeError("unknown atom");
}

inline CalculableSet build_set(const SetExprPtr& e,
                               const UniversePtr& target = nullptr) {
  switch (e->kind) {
    case SetExpr::Kind::Atom:
      return build_atom(e->atom, e->param);
    case SetExpr::Kind::Literal: {
      UniversePtr u = target;
      if (!u) u = resolve_default(infer_universe(*e));
      return make_literal_set(e->literal, u);
    }
    case SetExpr::Kind::Product: {
      CalculableSet a = build_set(e->lhs);
      CalculableSet b = build_set(e->rhs);
      return product(a, b);
    }
    default: {
      InferredUniverse iu = infer_universe(*e);
      UniversePtr u = target ? target : resolve_default(iu);
      CalculableSet a = build_set(e->lhs, u);
      CalculableSet b = build_set(e->rhs, u);
      if (e->kind == SetExpr::Kind::Minus &&
          e->rhs->kind == SetExpr::Kind::Literal) {
        std::vector<Element> part;
        for (const Element& x : e->rhs->literal) part.push_back(coerce(x, u));
        return minus_finite(a, part);
      }
      switch (e->kind) {
        case SetExpr::Kind::Union: return union_sets(a, b);
        case SetExpr::Kind::Inter: return inter_sets(a, b);
        default: return minus_sets(a, b);
      }
    }
  }
}

// ---- structural subset proofs ----------------------------------------------

namespace detail {

inline std::optional<std::uint64_t> multiples_index(const SetExpr& e) {
  if (e.kind != SetExpr::Kind::Atom) return std::nullopt;
  switch (e.atom) {
    case AtomKind::N: return 1;
    case AtomKind::E: return 2;
    case AtomKind::M: return e.param;
    default: return std::nullopt;
  }
}

inline std::optional<std::uint64_t> powers_index(const SetExpr& e) {
  if (e.kind != SetExpr::Kind::Atom) return std::nullopt;
  switch (e.atom) {
    case AtomKind::N: return 1;
    case AtomKind::S: return e.param;
    default: return std::nullopt;
  }
}

inline int rational_rank(AtomKind a) {
  switch (a) {
    case AtomKind::I: return 0;
    case AtomKind::Qpos: return 1;
    case AtomKind::Q: return 2;
    default: return -1;
  }
}

inline bool atom_subset(const SetExpr& a, const SetExpr& b) {
  if (a.atom == b.atom && a.param == b.param) return true;
  bool a_nat = a.atom == AtomKind::N || a.atom == AtomKind::E ||
               a.atom == AtomKind::O || a.atom == AtomKind::P ||
               a.atom == AtomKind::M || a.atom == AtomKind::S;
  if (b.atom == AtomKind::N && a_nat) return true;
  if ((b.atom == AtomKind::M && b.param == 1 && a_nat) ||
      (b.atom == AtomKind::S && b.param == 1 && a_nat))
    return true;
  auto am = multiples_index(a), bm = multiples_index(b);
  if (am && bm && *bm != 0 && *am % *bm == 0) return true;
  auto ap = powers_index(a), bp = powers_index(b);
  if (ap && bp && *bp != 0 && *ap % *bp == 0) return true;
  int ar = rational_rank(a.atom), br = rational_rank(b.atom);
  if (ar >= 0 && br >= 0 && ar <= br) return true;
  if (a.atom == AtomKind::N0 && b.atom == AtomKind::Z) return true;
  return false;
}

}  // namespace detail

// Sound syntactic inclusion proof; false means "not proven", not "disproven".
inline bool subset_proven(const SetExprPtr& a, const SetExprPtr& b) {
  if (expr_equal(*a, *b)) return true;
  if (b->kind == SetExpr::Kind::Union &&
      (subset_proven(a, b->lhs) || subset_proven(a, b->rhs)))
    return true;
  if (b->kind == SetExpr::Kind::Inter && subset_proven(a, b->lhs) &&
      subset_proven(a, b->rhs))
    return true;
  if (a->kind == SetExpr::Kind::Minus && subset_proven(a->lhs, b)) return true;
  if (a->kind == SetExpr::Kind::Inter &&
      (subset_proven(a->lhs, b) || subset_proven(a->rhs, b)))
    return true;
  if (a->kind == SetExpr::Kind::Union && subset_proven(a->lhs, b) &&
      subset_proven(a->rhs, b))
    return true;
  if (a->kind == SetExpr::Kind::Atom && b->kind == SetExpr::Kind::Atom)
    return detail::atom_subset(*a, *b);
  if (a->kind == SetExpr::Kind::Product && b->kind == SetExpr::Kind::Product)
    return subset_proven(a->lhs, b->lhs) && subset_proven(a->rhs, b->rhs);
  if (a->kind == SetExpr::Kind::Literal) {
    try {
      CalculableSet bs = build_set(b);
      for (const Element& x : a->literal)
        if (!bs.contains(coerce(x, bs.universe()))) return false;
      return true;
    } catch (const Error&) {
      return false;
    }
  }
  return false;
}

// ---- set-level comparison ---------------------------------------------------

inline ComparisonVerdict compare_sets(const SetExprPtr& a, const SetExprPtr& b,
                                      Index budget = 10'000) {
  if (expr_equal(*a, *b)) {
    ComparisonVerdict v;
    v.relation = Relation::Equal;
    v.witness = 0;
    v.reason = "identical expressions";
    return v;
  }
  CalculableSet A = build_set(a);
  CalculableSet B = build_set(b);
  ComparisonVerdict v = compare(A.size(), B.size(), budget);
  if (v.relation != Relation::Unknown) return v;
  if (same_universe(A.universe(), B.universe())) {
    if (subset_proven(a, b))
      return compare_monotone_gap(A.size(), B.size(), budget,
                                  "structural subset of " + B.name());
    if (subset_proven(b, a))
      return flipped(compare_monotone_gap(B.size(), A.size(), budget,
                                          "structural subset of " + A.name()));
  }
  return v;
}

}  // namespace sizeseq
