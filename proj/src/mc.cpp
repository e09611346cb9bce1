#include "mjls/mc.hpp"

#include "mjls/errors.hpp"
#include "mjls/random.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace mjls {

namespace {

void validate_mc(const JumpLinearSystem& sys, const Vector& xi0,
                 const MCConfig& cfg) {
  if (xi0.size() != sys.d) {
    throw InvalidInputError("monte carlo: xi0 has length " +
                            std::to_string(xi0.size()) + ", expected " +
                            std::to_string(sys.d));
  }
  if (cfg.trajectories < 1) {
    throw InvalidInputError("monte carlo: trajectory count must be >= 1");
  }
  if (cfg.horizon < 0) {
    throw InvalidInputError("monte carlo: negative horizon");
  }
  for (std::size_t r = 0; r < cfg.record_steps.size(); ++r) {
    const int k = cfg.record_steps[r];
    if (k < 0 || k > cfg.horizon) {
      throw InvalidInputError("monte carlo: recorded step " +
                              std::to_string(k) + " outside [0, " +
                              std::to_string(cfg.horizon) + "]");
    }
    if (r > 0 && k <= cfg.record_steps[r - 1]) {
      throw InvalidInputError(
          "monte carlo: record_steps must be strictly increasing");
    }
  }
}

// Accumulates Σx and Σx² over trajectories for one vector-valued statistic.
struct Accumulator {
  Vector sum;
  Vector sumsq;

  explicit Accumulator(Index size)
      : sum(Vector::Zero(size)), sumsq(Vector::Zero(size)) {}

  void add(const Vector& x) {
    sum += x;
    sumsq += x.cwiseProduct(x);
  }

  Vector mean(long long T) const { return sum / static_cast<double>(T); }

  Vector se(long long T) const {
    const double Td = static_cast<double>(T);
    Vector var = (sumsq - sum.cwiseProduct(sum) / Td) / (Td - 1.0);
    return var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(Td);
  }
};

}  // namespace

MCEstimate simulate_moments(const JumpLinearSystem& sys, const Vector& xi0,
                            const MCConfig& cfg) {
  validate_mc(sys, xi0, cfg);
  const Index n = sys.num_modes();
  const Index d = sys.d;
  const std::size_t R = cfg.record_steps.size();
  const long long T = cfg.trajectories;

  // One flat sample vector per recorded step:
  // [q (n·d) | Q (n·d²) | mean (d) | second moment (d²) | ‖ξ‖² | modes (n)].
  const Index off_Q = n * d;
  const Index off_mean = off_Q + n * d * d;
  const Index off_sec = off_mean + d;
  const Index off_msq = off_sec + d * d;
  const Index off_mode = off_msq + 1;
  const Index width = off_mode + n;
  std::vector<Accumulator> acc(R, Accumulator(width));

  Vector sample(width);
  for (long long t = 0; t < T; ++t) {
    Rng rng = substream(cfg.base_seed, static_cast<std::uint64_t>(t));
    Vector xi = xi0;
    Index z = rng.categorical(sys.chain.p0);
    std::size_t next_record = 0;
    for (int k = 0; k <= cfg.horizon; ++k) {
      if (next_record < R && cfg.record_steps[next_record] == k) {
        sample.setZero();
        sample.segment(z * d, d) = xi;
        const Matrix outer = xi * xi.transpose();
        sample.segment(off_Q + z * d * d, d * d) =
            Eigen::Map<const Vector>(outer.data(), d * d);
        sample.segment(off_mean, d) = xi;
        sample.segment(off_sec, d * d) =
            Eigen::Map<const Vector>(outer.data(), d * d);
        sample[off_msq] = xi.squaredNorm();
        sample[off_mode + z] = 1.0;
        acc[next_record].add(sample);
        ++next_record;
      }
      if (k == cfg.horizon) break;
      auto stepped = sample_step(sys, xi, z, rng);
      xi = std::move(stepped.first);
      z = stepped.second;
    }
  }

  MCEstimate est;
  est.trajectories = T;
  est.has_se = T > 1;
  est.steps.reserve(R);
  for (std::size_t r = 0; r < R; ++r) {
    const Vector m = acc[r].mean(T);
    const Vector s = est.has_se ? acc[r].se(T) : Vector();
    MCStepEstimate step;
    step.k = cfg.record_steps[r];
    for (Index i = 0; i < n; ++i) {
      step.q.push_back(m.segment(i * d, d));
      step.Q.push_back(Matrix(Eigen::Map<const Matrix>(
          m.segment(off_Q + i * d * d, d * d).data(), d, d)));
      if (est.has_se) {
        step.q_se.push_back(s.segment(i * d, d));
        step.Q_se.push_back(Matrix(Eigen::Map<const Matrix>(
            s.segment(off_Q + i * d * d, d * d).data(), d, d)));
      }
    }
    step.mean = m.segment(off_mean, d);
    step.second_moment =
        Eigen::Map<const Matrix>(m.segment(off_sec, d * d).data(), d, d);
    step.mean_square = m[off_msq];
    step.mode_freq = m.segment(off_mode, n);
    if (est.has_se) {
      step.mean_se = s.segment(off_mean, d);
      step.second_moment_se =
          Eigen::Map<const Matrix>(s.segment(off_sec, d * d).data(), d, d);
      step.mean_square_se = s[off_msq];
      step.mode_freq_se = s.segment(off_mode, n);
    } else {
      step.mean_square_se = std::numeric_limits<double>::quiet_NaN();
    }
    est.steps.push_back(std::move(step));
  }
  return est;
}

DivergenceReport divergence_probe(const JumpLinearSystem& sys,
                                  const Vector& xi0, const MCConfig& cfg) {
  validate_mc(sys, xi0, cfg);
  if (cfg.record_steps.size() < 2) {
    throw InvalidInputError(
        "divergence_probe: need at least two recorded steps for a slope fit");
  }
  const std::size_t R = cfg.record_steps.size();
  const long long T = cfg.trajectories;
  constexpr double kOverflowLimit = 1e150;

  std::vector<double> msq_sum(R, 0.0);
  for (long long t = 0; t < T; ++t) {
    Rng rng = substream(cfg.base_seed, static_cast<std::uint64_t>(t));
    Vector xi = xi0;
    Index z = rng.categorical(sys.chain.p0);
    std::size_t next_record = 0;
    for (int k = 0; k <= cfg.horizon; ++k) {
      const double norm2 = xi.squaredNorm();
      if (!std::isfinite(norm2) || norm2 > kOverflowLimit) {
        DivergenceReport rep;
        rep.verdict = GrowthVerdict::kGrowing;
        rep.slope = std::numeric_limits<double>::infinity();
        rep.overflow = true;
        rep.overflow_step = k;
        return rep;
      }
      if (next_record < R && cfg.record_steps[next_record] == k) {
        msq_sum[next_record] += norm2;
        ++next_record;
      }
      if (k == cfg.horizon) break;
      auto stepped = sample_step(sys, xi, z, rng);
      xi = std::move(stepped.first);
      z = stepped.second;
    }
  }

  double mean_k = 0.0;
  double mean_y = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    mean_k += cfg.record_steps[r];
    mean_y += std::log(std::max(msq_sum[r] / static_cast<double>(T), 1e-300));
  }
  mean_k /= static_cast<double>(R);
  mean_y /= static_cast<double>(R);
  double cov = 0.0;
  double var = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    const double dk = cfg.record_steps[r] - mean_k;
    const double dy =
        std::log(std::max(msq_sum[r] / static_cast<double>(T), 1e-300)) -
        mean_y;
    cov += dk * dy;
    var += dk * dk;
  }

  DivergenceReport rep;
  rep.slope = cov / var;
  if (rep.slope > 0.01) {
    rep.verdict = GrowthVerdict::kGrowing;
  } else if (rep.slope < 0.001) {
    rep.verdict = GrowthVerdict::kSettling;
  } else {
    rep.verdict = GrowthVerdict::kInconclusive;
  }
  return rep;
}

}  // namespace mjls
