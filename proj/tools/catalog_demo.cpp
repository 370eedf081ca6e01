// Short tour of the library API: catalog sets, size sequences, arithmetic on
// them, and certified comparisons.

#include <iostream>

#include "sizeseq/sets.hpp"

int main() {
  using namespace sizeseq;

  CalculableSet evens = set_evens();
  CalculableSet odds = set_odds();
  CalculableSet primes = set_primes();

  SizeSequence alpha = set_naturals().size();
  SizeSequence se = evens.size();
  SizeSequence so = odds.size();

  std::cout << "sigma(N) prefix: ";
  for (Count v : alpha.prefix(10)) std::cout << v << ' ';
  std::cout << "\nsigma(E) prefix: ";
  for (Count v : se.prefix(10)) std::cout << v << ' ';
  std::cout << "\nsigma(E) + sigma(O) = " << add(se, so).kind_tag() << ": ";
  for (Count v : add(se, so).prefix(10)) std::cout << v << ' ';
  std::cout << '\n';

  ComparisonVerdict eo = compare(se, so);
  std::cout << "compare(E, O): " << to_string(eo.relation);
  if (eo.witness) std::cout << " from m=" << *eo.witness;
  std::cout << " (" << eo.reason << ")\n";

  ComparisonVerdict pe = compare(primes.size(), se);
  std::cout << "compare(P, E): " << to_string(pe.relation);
  if (pe.witness) std::cout << " from m=" << *pe.witness;
  std::cout << " (" << pe.reason << ")\n";

  SizeSequence diff = subtract(alpha, SizeSequence::constant(3));
  std::cout << "alpha - 3 prefix: ";
  for (Count v : diff.prefix(10)) std::cout << v << ' ';
  std::cout << '\n';
  return 0;
}
