#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sizeseq/checked.hpp"
#include "sizeseq/envelope.hpp"
#include "sizeseq/qpoly.hpp"

namespace sizeseq {

// Arbitrary non-negative integer sequence (block sizes / characteristics).
class IntSequence {
 public:
  IntSequence() : f_([](Index) { return Count{0}; }) {}
  explicit IntSequence(std::function<Count(Index)> f) : f_(std::move(f)) {}

  Count operator()(Index n) const { return f_(n); }

  std::vector<Count> prefix(Index k) const {
    std::vector<Count> r;
    r.reserve(k);
    for (Index n = 1; n <= k; ++n) r.push_back(f_(n));
    return r;
  }

 private:
  std::function<Count(Index)> f_;
};

// Non-decreasing sequence of partial sizes. Values are computed on demand;
// characteristic-backed sequences keep a prefix-sum cache behind a mutex, so
// evaluation is observationally pure and safe to share across threads.
// Optional exact symbolic form and growth envelope ride along.
class SizeSequence {
  struct Impl {
    std::function<Count(Index)> eval;  // direct formula, or null if chi-backed
    std::function<Count(Index)> chi;   // chi-backed partial sums
    std::string kind_tag;
    std::optional<QuasiPolynomial> symbolic;
    std::optional<EnvelopeCertificate> envelope;
    mutable std::mutex mu;
    mutable std::vector<Count> sums;  // sums[i] = sigma(i+1)

    static constexpr Index kMaxPrefix = 10'000'000;

    Count value(Index n) const {
      if (n == 0) return 0;
      if (eval) return eval(n);
      if (n > kMaxPrefix)
        throw ResourceError("prefix-sum evaluation beyond " +
                            std::to_string(kMaxPrefix));
      std::lock_guard<std::mutex> lk(mu);
      while (sums.size() < n) {
        Index i = sums.size() + 1;
        Count prev = sums.empty() ? 0 : sums.back();
        sums.push_back(checked_add(prev, chi(i), i, "partial sum"));
      }
      return sums[n - 1];
    }
  };

 public:
  SizeSequence() : SizeSequence(constant(0)) {}

  static SizeSequence from_characteristic(IntSequence chi, std::string tag) {
    auto impl = std::make_shared<Impl>();
    impl->chi = [chi](Index n) { return chi(n); };
    impl->kind_tag = std::move(tag);
    return SizeSequence(std::move(impl));
  }

  static SizeSequence from_eval(std::function<Count(Index)> eval,
                                std::string tag,
                                std::optional<QuasiPolynomial> sym = {},
                                std::optional<EnvelopeCertificate> env = {}) {
    auto impl = std::make_shared<Impl>();
    impl->eval = std::move(eval);
    impl->kind_tag = std::move(tag);
    impl->symbolic = std::move(sym);
    impl->envelope = std::move(env);
    return SizeSequence(std::move(impl));
  }

  static SizeSequence constant(Count k) {
    auto qp = QuasiPolynomial::constant(k);
    std::optional<EnvelopeCertificate> env;
    if (k > 0) env = EnvelopeCertificate{{BigRat(k), BigRat(0), 0},
                                         {BigRat(k), BigRat(0), 0}, 1};
    return from_eval([k](Index) { return k; }, std::to_string(k), qp, env);
  }

  static SizeSequence naturals() {
    auto qp = QuasiPolynomial::affine(1, 0);
    return from_eval([](Index n) { return n; }, "sigma(N)", qp,
                     derive_envelope(qp));
  }

  Count operator()(Index n) const { return impl_->value(n); }

  std::vector<Count> prefix(Index k) const {
    std::vector<Count> r;
    r.reserve(k);
    for (Index n = 1; n <= k; ++n) r.push_back(impl_->value(n));
    return r;
  }

  const std::string& kind_tag() const { return impl_->kind_tag; }
  const std::optional<QuasiPolynomial>& symbolic() const {
    return impl_->symbolic;
  }
  const std::optional<EnvelopeCertificate>& envelope() const {
    return impl_->envelope;
  }

  SizeSequence with_symbolic(QuasiPolynomial qp) const {
    SizeSequence s = *this;
    return from_eval([s](Index n) { return s(n); }, s.kind_tag(), std::move(qp),
                     s.envelope());
  }

  SizeSequence with_envelope(EnvelopeCertificate env) const {
    SizeSequence s = *this;
    return from_eval([s](Index n) { return s(n); }, s.kind_tag(), s.symbolic(),
                     std::move(env));
  }

  SizeSequence renamed(std::string tag) const {
    SizeSequence s = *this;
    return from_eval([s](Index n) { return s(n); }, std::move(tag),
                     s.symbolic(), s.envelope());
  }

 private:
  explicit SizeSequence(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

inline SizeSequence add(const SizeSequence& a, const SizeSequence& b) {
  std::optional<QuasiPolynomial> sym;
  if (a.symbolic() && b.symbolic()) sym = qp_add(*a.symbolic(), *b.symbolic());
  std::optional<EnvelopeCertificate> env;
  if (a.envelope() && b.envelope()) env = env_add(*a.envelope(), *b.envelope());
  return SizeSequence::from_eval(
      [a, b](Index n) { return checked_add(a(n), b(n), n, "sequence add"); },
      "(" + a.kind_tag() + " + " + b.kind_tag() + ")", std::move(sym),
      std::move(env));
}

inline SizeSequence mul(const SizeSequence& a, const SizeSequence& b) {
  std::optional<QuasiPolynomial> sym;
  if (a.symbolic() && b.symbolic()) sym = qp_mul(*a.symbolic(), *b.symbolic());
  std::optional<EnvelopeCertificate> env;
  if (a.envelope() && b.envelope()) env = env_mul(*a.envelope(), *b.envelope());
  return SizeSequence::from_eval(
      [a, b](Index n) { return checked_mul(a(n), b(n), n, "sequence mul"); },
      "(" + a.kind_tag() + " * " + b.kind_tag() + ")", std::move(sym),
      std::move(env));
}

}  // namespace sizeseq
