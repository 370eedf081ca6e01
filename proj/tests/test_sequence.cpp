#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>
#include <vector>

#include "sizeseq/compare.hpp"
#include "sizeseq/sequence.hpp"

using namespace sizeseq;

namespace {

std::vector<Count> counts(std::initializer_list<Count> xs) { return xs; }

}  // namespace

TEST_CASE("partial sums accumulate the characteristic") {
  // chi = 1, 0, 2, 0, 3, ...
  SizeSequence s = SizeSequence::from_characteristic(
      IntSequence([](Index n) { return n % 2 == 1 ? (n + 1) / 2 : 0; }), "s");
  CHECK(s.prefix(6) == counts({1, 1, 3, 3, 6, 6}));
  CHECK(s(0) == 0);
}

TEST_CASE("sigma(0) is 0 for every construction") {
  CHECK(SizeSequence::naturals()(0) == 0);
  CHECK(SizeSequence::constant(7)(0) == 0);
  CHECK(SizeSequence::from_eval([](Index n) { return 2 * n; }, "d")(0) == 0);
}

TEST_CASE("naturals sequence is the identity") {
  SizeSequence a = SizeSequence::naturals();
  CHECK(a.prefix(5) == counts({1, 2, 3, 4, 5}));
  REQUIRE(a.symbolic().has_value());
  CHECK(a.symbolic()->eval(1000) == 1000);
}

TEST_CASE("add and mul act pointwise and carry symbolic forms") {
  SizeSequence a = SizeSequence::naturals();
  SizeSequence c = SizeSequence::constant(3);
  SizeSequence sum = add(a, c);
  SizeSequence prod = mul(a, a);
  CHECK(sum.prefix(4) == counts({4, 5, 6, 7}));
  CHECK(prod.prefix(5) == counts({1, 4, 9, 16, 25}));
  REQUIRE(sum.symbolic().has_value());
  REQUIRE(prod.symbolic().has_value());
  CHECK(sum.symbolic()->eval(100) == 103);
  CHECK(prod.symbolic()->eval(100) == 10000);
}

TEST_CASE("subtract clamps before the witness and matches after") {
  SizeSequence a = SizeSequence::naturals();
  SizeSequence c = SizeSequence::constant(3);
  SizeSequence d = subtract(a, c);
  CHECK(d.prefix(8) == counts({0, 0, 0, 1, 2, 3, 4, 5}));
  REQUIRE(d.symbolic().has_value());
  CHECK(d.symbolic()->eval(50) == 47);
}

TEST_CASE("subtract refuses an eventually larger subtrahend") {
  SizeSequence a = SizeSequence::naturals();
  CHECK_THROWS_AS(subtract(SizeSequence::constant(3), a),
                  UndefinedDifferenceError);
}

TEST_CASE("subtracting a sequence from itself gives zero") {
  SizeSequence a = SizeSequence::naturals();
  SizeSequence z = subtract(a, a);
  CHECK(z.prefix(10) == std::vector<Count>(10, 0));
}

TEST_CASE("checked arithmetic raises overflow with the failing index") {
  SizeSequence big = SizeSequence::from_eval(
      [](Index) { return Count{1} << 63; }, "big");
  SizeSequence doubled = add(big, big);
  try {
    (void)doubled(5);
    FAIL("expected overflow");
  } catch (const OverflowError& e) {
    CHECK(e.at() == 5);
  }
}

TEST_CASE("prefix cache is safe under concurrent evaluation") {
  std::atomic<int> calls{0};
  SizeSequence s = SizeSequence::from_characteristic(
      IntSequence([&calls](Index n) {
        calls.fetch_add(1, std::memory_order_relaxed);
        return n;
      }),
      "hammered");
  std::vector<std::thread> ts;
  std::atomic<bool> bad{false};
  for (int t = 0; t < 8; ++t)
    ts.emplace_back([&] {
      for (Index n = 1; n <= 2000; ++n)
        if (s(n) != n * (n + 1) / 2) bad = true;
    });
  for (auto& t : ts) t.join();
  CHECK_FALSE(bad.load());
  // each characteristic value computed exactly once despite 8 threads
  CHECK(calls.load() == 2000);
}

TEST_CASE("first differences of the sums recover the characteristic") {
  SizeSequence s = SizeSequence::from_characteristic(
      IntSequence([](Index n) { return (n * 37) % 5; }), "fd");
  for (Index n = 1; n <= 200; ++n)
    CHECK(s(n) - s(n - 1) == (n * 37) % 5);
}

TEST_CASE("renaming and annotation preserve values") {
  SizeSequence a = SizeSequence::naturals().renamed("alpha");
  CHECK(a.kind_tag() == "alpha");
  CHECK(a.prefix(4) == counts({1, 2, 3, 4}));
  REQUIRE(a.symbolic().has_value());
}

TEST_CASE("prefix-sum evaluation beyond the cache cap is refused") {
  SizeSequence s = SizeSequence::from_characteristic(
      IntSequence([](Index) { return Count{0}; }), "capped");
  CHECK_THROWS_AS(s(Index{20'000'000}), ResourceError);
}
