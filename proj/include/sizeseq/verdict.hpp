#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sizeseq/checked.hpp"

namespace sizeseq {

// Eventual (Frechet-filter) order between two size sequences.
enum class Relation {
  Equal,
  Less,
  Greater,
  LessEq,
  GreaterEq,
  Incomparable,
  Unknown,
};

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "Equal";
    case Relation::Less: return "Less";
    case Relation::Greater: return "Greater";
    case Relation::LessEq: return "LessEq";
    case Relation::GreaterEq: return "GreaterEq";
    case Relation::Incomparable: return "Incomparable";
    case Relation::Unknown: return "Unknown";
  }
  return "?";
}

inline Relation flipped(Relation r) {
  switch (r) {
    case Relation::Less: return Relation::Greater;
    case Relation::Greater: return Relation::Less;
    case Relation::LessEq: return Relation::GreaterEq;
    case Relation::GreaterEq: return Relation::LessEq;
    default: return r;
  }
}

// Eventual sign of a - b on one residue class mod `period`.
struct ClassSign {
  std::uint64_t residue = 0;
  std::uint64_t period = 1;
  int sign = 0;  // -1, 0, +1
};

// Two residue classes with opposite strict eventual order; proof handle for
// Incomparable verdicts.
struct IncomparabilityProof {
  std::uint64_t period = 1;
  std::uint64_t residue_less = 0;     // class where a <  b eventually
  std::uint64_t residue_greater = 0;  // class where a >  b eventually
};

struct ComparisonVerdict {
  Relation relation = Relation::Unknown;
  // For Equal/Less/Greater/LessEq/GreaterEq: the relation holds pointwise for
  // all n > witness. Absent for Incomparable/Unknown.
  std::optional<Index> witness;
  // For Unknown: every n in [1, checked_to] was scanned without a certificate.
  std::optional<Index> checked_to;
  std::optional<IncomparabilityProof> incomparability;
  std::vector<ClassSign> classes;  // per-residue breakdown when symbolic
  std::string reason;              // "symbolic residue classes", "envelope", ...
};

inline ComparisonVerdict flipped(ComparisonVerdict v) {
  v.relation = flipped(v.relation);
  if (v.incomparability)
    std::swap(v.incomparability->residue_less, v.incomparability->residue_greater);
  for (auto& c : v.classes) c.sign = -c.sign;
  return v;
}

}  // namespace sizeseq
