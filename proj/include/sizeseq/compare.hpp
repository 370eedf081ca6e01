#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>

#include "sizeseq/envelope.hpp"
#include "sizeseq/qpoly.hpp"
#include "sizeseq/sequence.hpp"
#include "sizeseq/verdict.hpp"

namespace sizeseq {

namespace detail {

inline bool pointwise_holds(Relation r, Count x, Count y) {
  switch (r) {
    case Relation::Equal: return x == y;
    case Relation::Less: return x < y;
    case Relation::Greater: return x > y;
    case Relation::LessEq: return x <= y;
    case Relation::GreaterEq: return x >= y;
    default: return false;
  }
}

// Walk the witness down over exact evaluations; every index strictly above the
// result has been verified (or is covered by the incoming certificate).
inline Index refine_witness(const SizeSequence& a, const SizeSequence& b,
                            Relation r, Index m, Index cap = 2'000'000) {
  Index steps = 0;
  while (m > 0 && steps < cap) {
    if (!pointwise_holds(r, a(m), b(m))) break;
    --m;
    ++steps;
  }
  return m;
}

}  // namespace detail

// Semi-decision of the eventual order of two size sequences.
//  1. exact symbolic forms on both sides: residue-class comparison (total)
//  2. envelope certificates (attached or derived from symbolic forms)
//  3. bounded pointwise scan: reports Unknown with the observed stable suffix
inline ComparisonVerdict compare(const SizeSequence& a, const SizeSequence& b,
                                 Index budget = 10'000) {
  if (a.symbolic() && b.symbolic()) {
    ComparisonVerdict v = qp_compare(*a.symbolic(), *b.symbolic());
    if (v.witness)
      v.witness = detail::refine_witness(a, b, v.relation, *v.witness);
    return v;
  }

  std::optional<EnvelopeCertificate> ea = a.envelope();
  if (!ea && a.symbolic()) ea = derive_envelope(*a.symbolic());
  std::optional<EnvelopeCertificate> eb = b.envelope();
  if (!eb && b.symbolic()) eb = derive_envelope(*b.symbolic());
  if (ea && eb) {
    if (auto m = env_separation(*ea, *eb)) {
      ComparisonVerdict v;
      v.relation = Relation::Less;
      v.witness = detail::refine_witness(a, b, Relation::Less, *m);
      v.reason = "envelope certificate (upper " + to_string(ea->upper) +
                 " vs lower " + to_string(eb->lower) + ")";
      return v;
    }
    if (auto m = env_separation(*eb, *ea)) {
      ComparisonVerdict v;
      v.relation = Relation::Greater;
      v.witness = detail::refine_witness(a, b, Relation::Greater, *m);
      v.reason = "envelope certificate (upper " + to_string(eb->upper) +
                 " vs lower " + to_string(ea->lower) + ")";
      return v;
    }
  }

  // bounded scan; never certifies, only reports the observed tail
  ComparisonVerdict v;
  v.relation = Relation::Unknown;
  v.checked_to = budget;
  Index last_lt = 0, last_gt = 0, last_eq = 0;
  for (Index n = 1; n <= budget; ++n) {
    Count x = a(n), y = b(n);
    if (x < y) last_lt = n;
    else if (x > y) last_gt = n;
    else last_eq = n;
  }
  std::ostringstream os;
  os << "bounded scan: ";
  Index tail_from = std::max({last_lt, last_gt, last_eq});
  if (tail_from == 0 || budget == 0) {
    os << "nothing scanned";
  } else {
    Index suffix_start = 1;
    if (last_lt == budget) suffix_start = std::max(last_gt, last_eq) + 1;
    else if (last_gt == budget) suffix_start = std::max(last_lt, last_eq) + 1;
    else suffix_start = std::max(last_lt, last_gt) + 1;
    const char* rel = last_lt == budget ? "<" : (last_gt == budget ? ">" : "=");
    os << "a(n) " << rel << " b(n) for " << suffix_start << " <= n <= "
       << budget << "; no certificate";
  }
  v.reason = os.str();
  return v;
}

// Comparison route for a certified inclusion: the caller guarantees
// sigma_a(n) <= sigma_b(n) for every n and that the difference is
// non-decreasing (counts of elements of the superset's complement part).
// The first strict gap then separates the sequences forever.
inline ComparisonVerdict compare_monotone_gap(const SizeSequence& a,
                                              const SizeSequence& b,
                                              Index budget,
                                              const std::string& why) {
  for (Index n = 1; n <= budget; ++n) {
    Count x = a(n), y = b(n);
    if (x < y) {
      ComparisonVerdict v;
      v.relation = Relation::Less;
      v.witness = n - 1;
      v.reason = why + "; first gap at n=" + std::to_string(n);
      return v;
    }
  }
  ComparisonVerdict v;
  v.relation = Relation::LessEq;
  v.witness = 0;
  v.checked_to = budget;
  v.reason = why + "; no strict gap up to n=" + std::to_string(budget);
  return v;
}

// a - b, defined when b is eventually dominated by a. Below the domination
// witness the value is clamped at zero.
inline SizeSequence subtract(const SizeSequence& a, const SizeSequence& b,
                             Index budget = 10'000) {
  ComparisonVerdict v = compare(b, a, budget);
  if (v.relation != Relation::Less && v.relation != Relation::LessEq &&
      v.relation != Relation::Equal) {
    throw UndefinedDifferenceError(
        "cannot subtract " + b.kind_tag() + " from " + a.kind_tag() +
        ": comparison yields " + std::string(to_string(v.relation)));
  }
  std::optional<QuasiPolynomial> sym;
  if (a.symbolic() && b.symbolic()) sym = qp_sub(*a.symbolic(), *b.symbolic());
  return SizeSequence::from_eval(
      [a, b](Index n) {
        Count x = a(n), y = b(n);
        return x < y ? Count{0} : x - y;
      },
      "(" + a.kind_tag() + " - " + b.kind_tag() + ")", std::move(sym));
}

}  // namespace sizeseq
