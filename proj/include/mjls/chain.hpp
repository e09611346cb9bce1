#pragma once

#include "mjls/types.hpp"

namespace mjls {

// Finite Markov chain: row-stochastic transition matrix P with
// P(i, j) = Prob(next = j | current = i), plus an initial distribution p0.
// Distributions are column vectors and evolve as p' = Pᵀ p.
struct MarkovChain {
  Matrix P;
  Vector p0;

  MarkovChain(Matrix transition, Vector initial);
  explicit MarkovChain(Matrix transition);  // uniform initial distribution

  Index num_states() const { return P.rows(); }
};

struct ChainAnalysis {
  bool ergodic = false;
  Vector p_inf;              // empty when not ergodic
  double mixing_rate = 0.0;  // second-largest eigenvalue modulus of P
};

// pᵏ = (Pᵀ)ᵏ p0, computed by repeated application of Pᵀ so the semigroup
// property holds exactly to rounding.
Vector evolve_distribution(const MarkovChain& chain, int k);

// Stationary distribution and mixing rate of an ergodic chain; throws
// AnalysisError when eigenvalue 1 of P is not the unique eigenvalue of
// modulus one.
ChainAnalysis stationary_distribution(const MarkovChain& chain);

// Same summary but never throws on non-ergodic chains: the ergodic flag and
// an empty p_inf report the failure instead.
ChainAnalysis analyze_chain(const MarkovChain& chain);

}  // namespace mjls
