#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sizeseq/envelope.hpp"
#include "sizeseq/qpoly.hpp"

using namespace sizeseq;

namespace {

EnvTerm term(BigRat c, BigRat a, int b) { return EnvTerm{c, a, b}; }

}  // namespace

TEST_CASE("natural log enclosures are tight and outward") {
  // double round-trips of the rational endpoints can drift by an ulp, so the
  // outwardness check allows that much and the width check is done exactly
  for (Index n : {Index{2}, Index{3}, Index{10}, Index{1000}, Index{999'983}}) {
    RatInterval iv = detail::ln_enclosure(n, 16);
    CHECK(iv.lo < iv.hi);
    CHECK(iv.hi - iv.lo < BigRat(1, 1'000'000));
    double lo = static_cast<double>(numerator(iv.lo)) /
                static_cast<double>(denominator(iv.lo));
    double hi = static_cast<double>(numerator(iv.hi)) /
                static_cast<double>(denominator(iv.hi));
    double truth = std::log(static_cast<double>(n));
    CHECK(lo <= truth + 1e-12);
    CHECK(truth <= hi + 1e-12);
  }
  // pinned rational bracket, no floating point involved: ln 2 = 0.6931471...
  RatInterval two = detail::ln_enclosure(2, 24);
  CHECK(two.lo > BigRat(6931471, 10'000'000));
  CHECK(two.hi < BigRat(6931472, 10'000'000));
}

TEST_CASE("term comparison is an exact three-way ordering") {
  EnvTerm half_n = term(BigRat(1, 2), 1, 0);
  EnvTerm n_over_log = term(1, 1, -1);
  EnvTerm sqrt_n = term(1, BigRat(1, 2), 0);

  // n/ln n vs n/2: equal logs are impossible, so interval refinement decides
  CHECK(term_cmp(n_over_log, half_n, 7) > 0);    // 7/1.945 = 3.59 > 3.5
  CHECK(term_cmp(n_over_log, half_n, 8) < 0);    // 8/2.079 = 3.84 < 4
  CHECK(term_cmp(sqrt_n, half_n, 4) == 0);       // 2 = 2 exactly
  CHECK(term_cmp(sqrt_n, half_n, 5) < 0);
  CHECK(term_cmp(sqrt_n, half_n, 3) > 0);
  CHECK(term_cmp(half_n, half_n, 17) == 0);
}

TEST_CASE("term comparison handles negative exponents") {
  EnvTerm inv_n = term(1, -1, 0);     // 1/n
  EnvTerm inv_sq = term(1, -2, 0);    // 1/n^2
  CHECK(term_cmp(inv_sq, inv_n, 2) < 0);
  CHECK(term_cmp(inv_n, inv_sq, 2) > 0);
  CHECK(term_cmp(inv_n, term(1, BigRat(-1, 2), 0), 4) < 0);  // 1/4 < 1/2
}

TEST_CASE("strict dominance is lexicographic in growth shape") {
  EnvTerm a = term(5, 1, 0);
  EnvTerm b = term(1, 2, 0);
  EnvTerm c = term(1, 2, 1);
  EnvTerm d = term(3, 2, 1);
  CHECK(strictly_precedes(a, b));
  CHECK(strictly_precedes(b, c));
  CHECK(strictly_precedes(c, d));
  CHECK_FALSE(strictly_precedes(b, a));
  CHECK_FALSE(strictly_precedes(a, a));
  CHECK(strictly_precedes(term(1, 1, -1), term(1, 1, 0)));
}

TEST_CASE("crossover for same-shape terms is immediate") {
  auto m = crossover(term(1, 1, 0), term(2, 1, 0));
  REQUIRE(m.has_value());
  CHECK(*m == 0);
}

TEST_CASE("crossover of root versus nearly-linear growth") {
  // sqrt(n) < n/ln n for all n >= 2
  auto m = crossover(term(1, BigRat(1, 2), 0), term(1, 1, -1));
  REQUIRE(m.has_value());
  CHECK(*m == 1);
}

TEST_CASE("crossover through a log factor lands exactly") {
  // 3n/ln n < n/2 exactly from n = 404 onward
  auto m = crossover(term(3, 1, -1), term(BigRat(1, 2), 1, 0));
  REQUIRE(m.has_value());
  CHECK(*m == 403);
}

TEST_CASE("crossover respects the floor") {
  auto m = crossover(term(1, 1, 0), term(2, 1, 0), 50);
  REQUIRE(m.has_value());
  CHECK(*m == 49);  // cannot certify below the supplied floor
}

TEST_CASE("no crossover without strict dominance") {
  CHECK_FALSE(crossover(term(2, 1, 0), term(1, 1, 0)).has_value());
  CHECK_FALSE(crossover(term(1, 1, 0), term(1, 1, 0)).has_value());
}

TEST_CASE("separation of certificates uses thresholds as floors") {
  EnvelopeCertificate sq{term(BigRat(1, 2), 2, 0), term(1, 2, 0), 3};
  EnvelopeCertificate cu{term(BigRat(1, 2), 3, 0), term(2, 3, 0), 5};
  auto m = env_separation(sq, cu);  // n^2 < n^3/2 from 3, floored at 5
  REQUIRE(m.has_value());
  CHECK(*m == 4);
  CHECK_FALSE(env_separation(cu, sq).has_value());
  EnvelopeCertificate same{term(1, 2, 0), term(1, 2, 0), 1};
  CHECK_FALSE(env_separation(same, same).has_value());
}

TEST_CASE("product envelopes multiply exactly") {
  EnvelopeCertificate a{term(1, 1, 0), term(2, 1, 0), 2};
  EnvelopeCertificate b{term(BigRat(1, 2), 1, -1), term(1, 1, 0), 7};
  EnvelopeCertificate p = env_mul(a, b);
  CHECK(p.lower.coeff == BigRat(1, 2));
  CHECK(p.lower.exponent == 2);
  CHECK(p.lower.log_exponent == -1);
  CHECK(p.upper.coeff == 2);
  CHECK(p.upper.exponent == 2);
  CHECK(p.threshold == 7);
}

TEST_CASE("sum envelopes keep the dominant shape") {
  EnvelopeCertificate lin{term(1, 1, 0), term(1, 1, 0), 1};
  EnvelopeCertificate sq{term(BigRat(1, 4), 2, 0), term(1, 2, 0), 2};
  auto s = env_add(lin, sq);
  REQUIRE(s.has_value());
  CHECK(s->lower.exponent == 2);
  CHECK(s->upper.coeff == 2);  // doubled dominant upper past the crossover
  CHECK(s->upper.exponent == 2);
  auto same = env_add(lin, lin);
  REQUIRE(same.has_value());
  CHECK(same->upper.coeff == 2);
  CHECK(same->upper.exponent == 1);
}

TEST_CASE("envelopes derived from quasi-polynomials are audited clean") {
  QuasiPolynomial z = QuasiPolynomial::affine(2, 1);
  auto env = derive_envelope(z);
  REQUIRE(env.has_value());
  auto bad = audit_envelope(*env, [](Index n) { return 2 * n + 1; }, 1, 20'000);
  CHECK_FALSE(bad.has_value());

  QuasiPolynomial half = QuasiPolynomial::floor_div(2);
  auto henv = derive_envelope(half);
  REQUIRE(henv.has_value());
  auto hbad = audit_envelope(*henv, [](Index n) { return n / 2; }, 1, 20'000);
  CHECK_FALSE(hbad.has_value());
}

TEST_CASE("audits catch a false certificate at the first bad index") {
  // claim sigma <= n/2 against sigma = n: wrong from the threshold on
  EnvelopeCertificate wrong{term(BigRat(1, 4), 1, 0), term(BigRat(1, 2), 1, 0),
                            4};
  auto bad = audit_envelope(wrong, [](Index n) { return n; }, 1, 100);
  REQUIRE(bad.has_value());
  CHECK(*bad == 4);
}

TEST_CASE("audit fast paths agree with the exact fallback") {
  auto eval = [](Index n) { return n / 3 + 1; };
  EnvelopeCertificate frac{term(BigRat(1, 4), 1, 0), term(1, 1, 0), 1};
  CHECK_FALSE(audit_envelope(frac, eval, 1, 50'000).has_value());

  // log-bearing pair around pi(n)-like growth, checked on a synthetic curve
  auto curve = [](Index n) {
    return static_cast<Count>(1.1 * n / std::log(static_cast<double>(n))) + 1;
  };
  EnvelopeCertificate logc{term(BigRat(9, 10), 1, -1), term(BigRat(3, 2), 1, -1),
                           10};
  CHECK_FALSE(audit_envelope(logc, curve, 10, 50'000).has_value());

  EnvelopeCertificate root{term(BigRat(1, 2), BigRat(1, 2), 0),
                           term(1, BigRat(1, 2), 0), 1};
  auto sq = [](Index n) {
    Index r = static_cast<Index>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
  };
  CHECK_FALSE(audit_envelope(root, sq, 1, 50'000).has_value());
}
