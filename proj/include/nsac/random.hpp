#pragma once

#include <cstdint>
#include <random>

#include "nsac/polynomial.hpp"
#include "nsac/tensor.hpp"

namespace nsac {

// Derives independent per-task seeds from one master seed (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RandomFieldOptions {
  std::size_t dimension = 3;
  unsigned max_degree = 2;
  long coeff_bound = 3;  // coefficients are integers in [-bound, bound]
};

class FieldGenerator {
 public:
  FieldGenerator(std::uint64_t seed, RandomFieldOptions opts) : rng_(seed), opts_(opts) {}

  // Every monomial of degree <= max_degree gets an independent coefficient.
  Polynomial polynomial() {
    std::uniform_int_distribution<long> coeff(-opts_.coeff_bound, opts_.coeff_bound);
    std::vector<Term> terms;
    std::vector<unsigned> e(opts_.dimension, 0);
    enumerate(e, 0, opts_.max_degree, [&](const std::vector<unsigned>& ex) {
      std::uint64_t key = 0;
      for (std::size_t k = 0; k < ex.size(); ++k) key += std::uint64_t{ex[k]} << Monomial::shift(k);
      terms.push_back({Monomial(key), Rational(coeff(rng_))});
    });
    return Polynomial::from_terms(opts_.dimension, std::move(terms));
  }

  TensorField tensor(Valence v) {
    TensorField t(opts_.dimension, v);
    for (std::size_t f = 0; f < t.size(); ++f) t[f] = polynomial();
    return t;
  }

  Rational small_rational(long bound = 5) {
    std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
    return Rational(num(rng_), den(rng_));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  template <class F>
  static void enumerate(std::vector<unsigned>& e, std::size_t var, unsigned budget, F&& f) {
    if (var == e.size()) {
      f(e);
      return;
    }
    for (unsigned d = 0; d <= budget; ++d) {
      e[var] = d;
      enumerate(e, var + 1, budget - d, f);
    }
    e[var] = 0;
  }

  std::mt19937_64 rng_;
  RandomFieldOptions opts_;
};

}  // namespace nsac
