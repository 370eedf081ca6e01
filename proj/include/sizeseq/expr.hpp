#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sizeseq/element.hpp"

namespace sizeseq {

enum class AtomKind { N, N0, Z, Q, Qpos, I, E, O, P, M, S };

inline std::string atom_name(AtomKind a, std::uint64_t param) {
  switch (a) {
    case AtomKind::N: return "N";
    case AtomKind::N0: return "N0";
    case AtomKind::Z: return "Z";
    case AtomKind::Q: return "Q";
    case AtomKind::Qpos: return "Qpos";
    case AtomKind::I: return "I";
    case AtomKind::E: return "E";
    case AtomKind::O: return "O";
    case AtomKind::P: return "P";
    case AtomKind::M: return "M(" + std::to_string(param) + ")";
    case AtomKind::S: return "S(" + std::to_string(param) + ")";
  }
  return "?";
}

struct SetExpr;
using SetExprPtr = std::shared_ptr<const SetExpr>;

struct SetExpr {
  enum class Kind { Atom, Literal, Union, Inter, Minus, Product };

  Kind kind = Kind::Atom;
  AtomKind atom = AtomKind::N;
  std::uint64_t param = 0;        // M(k) / S(k)
  std::vector<Element> literal;   // raw parsed members, coerced at build time
  SetExprPtr lhs, rhs;

  static SetExprPtr make_atom(AtomKind a, std::uint64_t param = 0) {
    auto e = std::make_shared<SetExpr>();
    e->kind = Kind::Atom;
    e->atom = a;
    e->param = param;
    return e;
  }

  static SetExprPtr make_literal(std::vector<Element> members) {
    auto e = std::make_shared<SetExpr>();
    e->kind = Kind::Literal;
    e->literal = std::move(members);
    return e;
  }

  static SetExprPtr make_binary(Kind k, SetExprPtr l, SetExprPtr r) {
    auto e = std::make_shared<SetExpr>();
    e->kind = k;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
};

namespace detail {

inline int expr_precedence(SetExpr::Kind k) {
  switch (k) {
    case SetExpr::Kind::Union:
    case SetExpr::Kind::Minus: return 1;
    case SetExpr::Kind::Inter: return 2;
    case SetExpr::Kind::Product: return 3;
    default: return 4;
  }
}

inline const char* expr_op(SetExpr::Kind k) {
  switch (k) {
    case SetExpr::Kind::Union: return "union";
    case SetExpr::Kind::Inter: return "inter";
    case SetExpr::Kind::Minus: return "minus";
    case SetExpr::Kind::Product: return "x";
    default: return "?";
  }
}

}  // namespace detail

inline std::string to_string(const SetExpr& e, int parent_prec = 0) {
  switch (e.kind) {
    case SetExpr::Kind::Atom:
      return atom_name(e.atom, e.param);
    case SetExpr::Kind::Literal: {
      std::string s = "{";
      for (std::size_t i = 0; i < e.literal.size(); ++i) {
        if (i) s += ", ";
        s += to_string(e.literal[i]);
      }
      return s + "}";
    }
    default: {
      int prec = detail::expr_precedence(e.kind);
      // left-associative: the right child needs parens at equal precedence
      std::string s = to_string(*e.lhs, prec) + " " +
                      detail::expr_op(e.kind) + " " +
                      to_string(*e.rhs, prec + 1);
      if (prec < parent_prec) return "(" + s + ")";
      return s;
    }
  }
}

inline std::string to_string(const SetExprPtr& e) { return to_string(*e); }

inline bool expr_equal(const SetExpr& a, const SetExpr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case SetExpr::Kind::Atom:
      return a.atom == b.atom && a.param == b.param;
    case SetExpr::Kind::Literal: {
      if (a.literal.size() != b.literal.size()) return false;
      for (std::size_t i = 0; i < a.literal.size(); ++i)
        if (!(a.literal[i] == b.literal[i])) return false;
      return true;
    }
    default:
      return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
  }
}

// ---- universe inference -----------------------------------------------------

// Literals are flexible: {3, 4} can live in the naturals, integers or
// rationals, adapting to whatever it is combined with.
struct InferredUniverse {
  UniversePtr concrete;      // set when !flexible
  bool flexible = false;
  bool fits_naturals = false;  // flexible literal with all members >= 1
};

inline UniversePtr resolve_default(const InferredUniverse& iu) {
  if (!iu.flexible) return iu.concrete;
  return iu.fits_naturals ? universe_naturals() : universe_integers();
}

inline bool flexible_fits(const InferredUniverse& iu, const UniversePtr& u) {
  switch (u->kind) {
    case UniverseKind::Naturals: return iu.fits_naturals;
    case UniverseKind::Integers: return true;
    case UniverseKind::Rationals: return true;
    default: return false;
  }
}

inline InferredUniverse infer_universe(const SetExpr& e) {
  switch (e.kind) {
    case SetExpr::Kind::Atom:
      switch (e.atom) {
        case AtomKind::N: case AtomKind::E: case AtomKind::O:
        case AtomKind::P: case AtomKind::M: case AtomKind::S:
          return {universe_naturals(), false, false};
        case AtomKind::N0: case AtomKind::Z:
          return {universe_integers(), false, false};
        default:
          return {universe_rationals(), false, false};
      }
    case SetExpr::Kind::Literal: {
      bool all_pos = true;
      bool plain_ints = true;
      for (const Element& x : e.literal) {
        if (x.is_int()) {
          if (x.integer() < 1) all_pos = false;
        } else if (x.is_nat()) {
          // fine
        } else {
          plain_ints = false;
        }
      }
      if (plain_ints) return {nullptr, true, all_pos};
      // mixed content: type it concretely by its members
      UniversePtr u;
      for (const Element& x : e.literal) {
        UniversePtr xu = x.is_int() || x.is_nat()
                             ? nullptr  // adapts to the concrete member kind
                             : element_universe(x);
        if (!xu) continue;
        if (!u) u = xu;
        else if (!same_universe(u, xu))
          throw TypeError("literal mixes universes " + to_string(u) + " and " +
                          to_string(xu));
      }
      return {u ? u : universe_integers(), false, false};
    }
    case SetExpr::Kind::Product: {
      InferredUniverse l = infer_universe(*e.lhs);
      InferredUniverse r = infer_universe(*e.rhs);
      return {universe_pair(resolve_default(l), resolve_default(r)), false,
              false};
    }
    default: {
      InferredUniverse l = infer_universe(*e.lhs);
      InferredUniverse r = infer_universe(*e.rhs);
      if (!l.flexible && !r.flexible) {
        if (!same_universe(l.concrete, r.concrete))
          throw TypeError("operands of '" +
                          std::string(detail::expr_op(e.kind)) +
                          "' mix universes " + to_string(l.concrete) +
                          " and " + to_string(r.concrete));
        return l;
      }
      if (!l.flexible || !r.flexible) {
        const InferredUniverse& conc = l.flexible ? r : l;
        const InferredUniverse& flex = l.flexible ? l : r;
        if (!flexible_fits(flex, conc.concrete))
          throw TypeError("literal operand does not fit universe " +
                          to_string(conc.concrete));
        return conc;
      }
      return {nullptr, true, l.fits_naturals && r.fits_naturals};
    }
  }
}

}  // namespace sizeseq
