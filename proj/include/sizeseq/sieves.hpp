#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "sizeseq/checked.hpp"

namespace sizeseq {

// Prime and totient tables, built once per process and shared read-only.
// Snapshots are immutable; growth swaps in a larger snapshot.
class Sieves {
 public:
  struct Snapshot {
    Index limit = 0;
    std::vector<bool> is_prime;         // [0, limit]
    std::vector<std::uint32_t> pi;      // pi[n] = #primes <= n
    std::vector<std::uint32_t> phi;     // Euler phi
    std::vector<Count> phi_sum;         // phi_sum[n] = phi(1)+...+phi(n)
  };

  static constexpr Index kMaxLimit = 8'000'000;

  static std::shared_ptr<const Snapshot> at_least(Index need) {
    if (need > kMaxLimit)
      throw ResourceError("sieve request " + std::to_string(need) +
                          " exceeds cap " + std::to_string(kMaxLimit));
    static std::mutex mu;
    static std::shared_ptr<const Snapshot> current;
    std::lock_guard<std::mutex> lk(mu);
    if (current && current->limit >= need) return current;
    Index limit = std::max<Index>(need, current ? current->limit * 2 : 65536);
    limit = std::min<Index>(limit, kMaxLimit);
    current = build(limit);
    return current;
  }

 private:
  static std::shared_ptr<const Snapshot> build(Index n) {
    auto s = std::make_shared<Snapshot>();
    s->limit = n;
    s->is_prime.assign(n + 1, false);
    s->pi.assign(n + 1, 0);
    s->phi.assign(n + 1, 0);
    s->phi_sum.assign(n + 1, 0);
    if (n >= 1) s->phi[1] = 1;
    std::vector<std::uint32_t> primes;
    std::vector<bool> comp(n + 1, false);
    for (Index i = 2; i <= n; ++i) {
      if (!comp[i]) {
        primes.push_back(static_cast<std::uint32_t>(i));
        s->phi[i] = static_cast<std::uint32_t>(i - 1);
      }
      for (std::uint32_t p : primes) {
        if (p * i > n) break;
        comp[p * i] = true;
        if (i % p == 0) {
          s->phi[p * i] = s->phi[i] * p;
          break;
        }
        s->phi[p * i] = s->phi[i] * (p - 1);
      }
    }
    std::uint32_t count = 0;
    Count acc = 0;
    for (Index i = 0; i <= n; ++i) {
      if (i >= 2 && !comp[i]) {
        s->is_prime[i] = true;
        ++count;
      }
      s->pi[i] = count;
      if (i >= 1) {
        acc += s->phi[i];
        s->phi_sum[i] = acc;
      }
    }
    return s;
  }
};

inline Count prime_pi(Index n) {
  if (n < 2) return 0;
  return Sieves::at_least(n)->pi[n];
}

inline bool is_prime(Index n) {
  if (n < 2) return false;
  return Sieves::at_least(n)->is_prime[n];
}

inline Count totient(Index n) {
  if (n == 0) throw TypeError("totient of 0");
  return Sieves::at_least(n)->phi[n];
}

inline Count totient_sum(Index n) {
  if (n == 0) return 0;
  return Sieves::at_least(n)->phi_sum[n];
}

}  // namespace sizeseq
