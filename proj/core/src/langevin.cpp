#include "cvsteady/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/version.hpp>

#include "cvsteady/error.hpp"

namespace cvsteady::langevin {

const char* const kRngAlgorithm =
    "mt19937_64 per trajectory seeded by splitmix64(splitmix64(seed) + "
    "trajectory); normals by ziggurat (boost::random " BOOST_LIB_VERSION ")";

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) + index);
}

double resolve_dt(const SystemParams& sys, const NoiseModel& model) {
  const double dt = model.dt > 0.0 ? model.dt : default_time_step(sys);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
  if (dt > max_time_step(sys) * (1.0 + 1e-12))
    throw InvalidArgument("dt = " + std::to_string(dt) +
                          " exceeds 0.01/max(gamma, J, |detuning|) = " +
                          std::to_string(max_time_step(sys)));
  return dt;
}

void check_bath(const DerivedBath& bath, const char* name) {
  if (!bath.is_physical())
    throw UnphysicalBath(std::string(name) +
                         " violates |M|^2 <= N(N+1) (N = " +
                         std::to_string(bath.N) + ", |M| = " +
                         std::to_string(std::abs(bath.M)) + ")");
}

}  // namespace

struct NoiseGenerator::Engine {
  explicit Engine(std::uint64_t s) : gen(s) {}
  boost::random::mt19937_64 gen;
  boost::random::normal_distribution<double> normal;

  Vec4 standard() {
    Vec4 z;
    for (int i = 0; i < 4; ++i) z(i) = normal(gen);
    return z;
  }
};

double max_time_step(const SystemParams& sys) {
  const double scale = std::max({sys.gamma1(), sys.gamma2(), sys.J(),
                                 std::abs(sys.detuning())});
  return 0.01 / scale;
}

double default_time_step(const SystemParams& sys) {
  return 0.2 * max_time_step(sys);
}

Mat4 step_covariance(const SystemParams& sys, const NoiseModel& model) {
  const double dt = resolve_dt(sys, model);
  return build_diffusion_rotating(sys, model.bath1, model.bath2) * dt;
}

Mat4 noise_factor(const SystemParams& sys, const NoiseModel& model) {
  check_bath(model.bath1, "bath1");
  check_bath(model.bath2, "bath2");
  const Mat4 C = step_covariance(sys, model);
  const Eigen::LDLT<Mat4> ldlt(C);
  const Vec4 d = ldlt.vectorD();
  const double scale = C.diagonal().maxCoeff();
  if (ldlt.info() != Eigen::Success || d.minCoeff() < -1e-12 * scale)
    throw UnphysicalBath("per-step noise covariance is not positive semidefinite");
  const Vec4 root = d.cwiseMax(0.0).cwiseSqrt();
  const Mat4 L = ldlt.matrixL();
  Mat4 factor = L * root.asDiagonal();
  factor = ldlt.transpositionsP().transpose() * factor;
  return factor;
}

NoiseGenerator::NoiseGenerator(const SystemParams& sys, const NoiseModel& model,
                               std::uint64_t index)
    : factor_(noise_factor(sys, model)),
      engine_(std::make_unique<Engine>(stream_seed(model.seed, index))) {}

NoiseGenerator::~NoiseGenerator() = default;
NoiseGenerator::NoiseGenerator(NoiseGenerator&&) noexcept = default;
NoiseGenerator& NoiseGenerator::operator=(NoiseGenerator&&) noexcept = default;

Vec4 NoiseGenerator::next_standard() { return engine_->standard(); }

Vec4 NoiseGenerator::next() { return factor_ * engine_->standard(); }

std::vector<Vec4> generate_noise(const SystemParams& sys, const NoiseModel& model,
                                 std::size_t n) {
  NoiseGenerator gen(sys, model, 0);
  std::vector<Vec4> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gen.next());
  return out;
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

EnsembleEstimate run_ensemble(const SystemParams& sys, const NoiseModel& model,
                              const EnsembleOptions& options) {
  if (options.n_traj < 2) throw InvalidArgument("n_traj must be >= 2");
  if (options.threads < 1) throw InvalidArgument("threads must be >= 1");
  if (options.noise_substeps < 1) throw InvalidArgument("noise_substeps must be >= 1");

  const double dt = resolve_dt(sys, model);
  const double t_min = 10.0 / std::min(sys.gamma1(), sys.gamma2());
  const double t_end = options.t_end > 0.0 ? options.t_end : t_min;
  if (t_end < t_min * (1.0 - 1e-12))
    throw InvalidArgument("t_end must be >= 10/min(gamma) = " + std::to_string(t_min));
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));

  NoiseModel sub = model;
  sub.dt = dt / options.noise_substeps;
  const Mat4 factor = noise_factor(sys, sub);
  const Mat4 F = Mat4::Identity() + build_drift_rotating(sys) * dt;

  const std::size_t n = options.n_traj;
  // Final states, one column per quadrature, indexed by trajectory.
  std::vector<double> finals(4 * n);

  auto simulate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      NoiseGenerator::Engine engine(stream_seed(model.seed, i));
      Vec4 x = options.initial_mean;
      for (std::size_t s = 0; s < steps; ++s) {
        Vec4 next = F * x;
        if (options.noise) {
          for (unsigned q = 0; q < options.noise_substeps; ++q)
            next.noalias() += factor * engine.standard();
        }
        x = next;
      }
      for (int k = 0; k < 4; ++k) finals[k * n + i] = x(k);
    }
  };

  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(options.threads, n));
  if (threads == 1) {
    simulate(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(n, t * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back(simulate, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  EnsembleEstimate est;
  est.n_traj = n;
  est.dt = dt;
  est.steps = steps;
  est.t_end = dt * static_cast<double>(steps);
  est.rng = kRngAlgorithm;

  const double nd = static_cast<double>(n);
  for (int k = 0; k < 4; ++k) est.mean(k) = pairwise_sum(&finals[k * n], n) / nd;

  std::vector<double> prod(n);
  std::vector<double> dev(n);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      for (std::size_t t = 0; t < n; ++t)
        prod[t] = (finals[i * n + t] - est.mean(i)) * (finals[j * n + t] - est.mean(j));
      const double cov = pairwise_sum(prod.data(), n) / (nd - 1.0);
      for (std::size_t t = 0; t < n; ++t) {
        const double e = prod[t] - cov;
        dev[t] = e * e;
      }
      const double var = pairwise_sum(dev.data(), n) / (nd - 1.0);
      const double se = std::sqrt(var / nd);
      est.V_hat(i, j) = est.V_hat(j, i) = cov;
      est.standard_error(i, j) = est.standard_error(j, i) = se;
    }
  }
  return est;
}

}  // namespace cvsteady::langevin
