#pragma once

// Shared helpers for the test binaries: deterministic random instances and
// tiny statistics utilities.

#include "mjls/chain.hpp"
#include "mjls/jump.hpp"
#include "mjls/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testutil {

inline mjls::Matrix random_matrix(std::mt19937_64& gen, mjls::Index rows,
                                  mjls::Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  mjls::Matrix M(rows, cols);
  for (mjls::Index i = 0; i < rows; ++i) {
    for (mjls::Index j = 0; j < cols; ++j) M(i, j) = dist(gen);
  }
  return M;
}

inline mjls::Vector random_vector(std::mt19937_64& gen, mjls::Index size,
                                  double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  mjls::Vector v(size);
  for (mjls::Index i = 0; i < size; ++i) v[i] = dist(gen);
  return v;
}

// Strictly positive rows, so the chain is ergodic.
inline mjls::MarkovChain random_chain(std::mt19937_64& gen, mjls::Index n) {
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  mjls::Matrix P(n, n);
  for (mjls::Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (mjls::Index j = 0; j < n; ++j) {
      P(i, j) = dist(gen);
      row_sum += P(i, j);
    }
    P.row(i) /= row_sum;
    P(i, n - 1) = 1.0 - P.row(i).head(n - 1).sum();
  }
  mjls::Vector p0(n);
  double s = 0.0;
  for (mjls::Index i = 0; i < n; ++i) {
    p0[i] = dist(gen);
    s += p0[i];
  }
  p0 /= s;
  p0[n - 1] = 1.0 - p0.head(n - 1).sum();
  return mjls::MarkovChain(std::move(P), std::move(p0));
}

// Mode matrices clustered around -1.2·I keep the mean map Hurwitz, so small
// step sizes give mean-square stable systems.
inline mjls::JumpLinearSystem random_stable_system(std::mt19937_64& gen,
                                                   mjls::Index n, mjls::Index d,
                                                   double alpha) {
  mjls::MarkovChain chain = random_chain(gen, n);
  std::vector<mjls::Matrix> A;
  std::vector<mjls::Vector> b;
  for (mjls::Index i = 0; i < n; ++i) {
    A.push_back(-1.2 * mjls::Matrix::Identity(d, d) +
                random_matrix(gen, d, d, -0.3, 0.3));
    b.push_back(random_vector(gen, d, -1.0, 1.0));
  }
  return mjls::JumpLinearSystem(std::move(chain), std::move(A), std::move(b),
                                alpha);
}

// Ordinary-least-squares slope of y against x.
inline double ols_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double cov = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    var += (x[i] - mx) * (x[i] - mx);
  }
  return cov / var;
}

}  // namespace testutil
