#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qdent/cascade.hpp"

using namespace qdent;

namespace {

const CascadeParams kHandSolved{2.0, 1.0, 0.0, 1.0};  // Γ_XX, Γ_X, Γ_S, p

double diff(const Populations& a, const std::array<double, 4>& b) {
  return std::max({std::abs(a.x_c - b[0]), std::abs(a.x_s - b[1]), std::abs(a.xx - b[2]),
                   std::abs(a.g - b[3])});
}

std::vector<CascadeParams> parameter_sets() {
  return {kHandSolved,
          {1.5, 1.0, 0.0, 0.2},
          {1.5, 1.0, 0.7, 0.2},
          {1.0, 1.0, 0.0, 1e-3},
          {20.0, 0.05, 3.0, 10.0},
          {1.0, 1.0, 0.0, 0.0}};
}

double min_nonzero_rate(const CascadeParams& c) {
  double m = std::min(c.gamma_x, c.gamma_xx);
  if (c.gamma_s > 0) m = std::min(m, c.gamma_s);
  if (c.p > 0) m = std::min(m, c.p);
  return m;
}

}  // namespace

TEST_CASE("after-XX examples") {
  const Populations p0 = populations_after_xx(kHandSolved, 0.0);
  CHECK(p0.x_c == 1.0);
  CHECK(p0.x_s == 0.0);
  CHECK(p0.xx == 0.0);
  CHECK(p0.g == 0.0);

  const CascadeParams decay{1.5, 0.8, 0.0, 0.0};
  for (double tau : {0.1, 1.0, 7.5}) {
    const Populations p = populations_after_xx(decay, tau);
    CHECK(std::abs(p.x_c - std::exp(-0.8 * tau)) < 1e-12);
    CHECK(std::abs(p.g - (1 - std::exp(-0.8 * tau))) < 1e-12);
    CHECK(std::abs(p.x_s) < 1e-12);
    CHECK(std::abs(p.xx) < 1e-12);
  }

  CHECK(diff(populations_after_xx(kHandSolved, 200.0), {0, 0.4, 0.2, 0.4}) < 1e-12);
}

TEST_CASE("after-X examples") {
  CHECK(diff(populations_after_x(kHandSolved, 0.0), {0, 0, 0, 1}) == 0.0);
  const CascadeParams dark{1.5, 1.0, 0.3, 0.0};
  for (double tau : {0.5, 3.0, 100.0}) CHECK(diff(populations_after_x(dark, tau), {0, 0, 0, 1}) < 1e-14);
  for (const auto& c : parameter_sets()) {
    for (double tau : {0.1, 1.0, 10.0, 1e4}) CHECK(populations_after_x(c, tau).x_c == 0.0);
  }
  const CascadeParams c{1.5, 1.0, 0.0, 0.2};
  for (double tau : {1e-2, 1e-3, 1e-4}) {
    const double ratio = populations_after_x(c, tau).xx / (c.p * c.p * tau * tau / 2);
    CHECK(std::abs(ratio - 1.0) < 5.0 * tau);
  }
}

TEST_CASE("coherent population keeps relative accuracy at long delay") {
  for (const auto& c : parameter_sets()) {
    const double rate = c.gamma_x + c.gamma_s + c.p;
    for (double tau : {20.0, 60.0, 200.0}) {
      const Populations pop = populations_after_xx(c, tau);
      CHECK(pop.x_c == doctest::Approx(std::exp(-rate * tau)).epsilon(1e-12));
      CHECK(std::abs(pop.sum() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("steady state examples") {
  const SteadyState ss = steady_state(kHandSolved);
  CHECK_FALSE(ss.absorbing);
  CHECK(diff(ss.populations, {0, 0.4, 0.2, 0.4}) < 1e-14);

  CHECK(steady_state({1.5, 1.0, 0.0, 1e4}).populations.xx > 0.999);
  CHECK(steady_state({1.5, 1.0, 0.0, 1e6}).populations.xx > 1 - 1e-5);

  const Populations base = steady_state({1.5, 1.0, 0.0, 0.2}).populations;
  for (double gs : {0.1, 1.0, 10.0}) {
    CHECK(diff(steady_state({1.5, 1.0, gs, 0.2}).populations, {base.x_c, base.x_s, base.xx, base.g}) < 1e-14);
  }
  CHECK(steady_state({1.5, 1.0, 0.0, 0.0}).absorbing);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(populations_after_xx(kHandSolved, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(populations_after_x(kHandSolved, -1e-9), std::invalid_argument);
  CHECK_THROWS_AS(CascadeParams({1.0, 0.0, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CascadeParams({0.0, 1.0, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CascadeParams({1.0, 1.0, -0.1, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CascadeParams({1.0, 1.0, 0.0, NAN}).validate(), std::invalid_argument);
}

TEST_CASE("conservation and non-negativity on a log grid") {
  for (const auto& c : parameter_sets()) {
    const double t_max = 100.0 / min_nonzero_rate(c);
    for (int i = -1; i <= 400; ++i) {
      const double tau = i < 0 ? 0.0 : 1e-4 * std::pow(t_max / 1e-4, i / 400.0);
      for (const Populations& p : {populations_after_xx(c, tau), populations_after_x(c, tau)}) {
        CHECK(std::abs(p.sum() - 1.0) < 1e-9);
        CHECK(p.x_c >= -1e-9);
        CHECK(p.x_s >= -1e-9);
        CHECK(p.xx >= -1e-9);
        CHECK(p.g >= -1e-9);
        CHECK(p.x_c <= 1 + 1e-9);
        CHECK(p.x_s <= 1 + 1e-9);
        CHECK(p.xx <= 1 + 1e-9);
        CHECK(p.g <= 1 + 1e-9);
      }
    }
  }
}

TEST_CASE("matrix exponential agrees with RK4") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> t(0.0, 12.0);
  for (const auto& c : parameter_sets()) {
    for (int i = 0; i < 50; ++i) {
      const double tau = t(rng);
      CHECK(diff(populations_after_xx(c, tau), oracle::rk4_populations(c, {1, 0, 0, 0}, tau)) < 1e-6);
      CHECK(diff(populations_after_x(c, tau), oracle::rk4_populations(c, {0, 0, 0, 1}, tau)) < 1e-6);
    }
  }
}

TEST_CASE("degenerate spectrum falls back to scaling and squaring") {
  const CascadeParams c{1.0, 1.0, 0.0, 0.0};
  const CascadePropagator prop(c);
  CHECK_FALSE(prop.uses_eigendecomposition());
  CHECK(CascadePropagator({1.5, 1.0, 0.0, 0.2}).uses_eigendecomposition());
  for (double tau : {0.3, 2.0, 9.0}) {
    CHECK(diff(prop.evolve({0, 0, 1, 0}, tau), oracle::rk4_populations(c, {0, 0, 1, 0}, tau)) < 1e-6);
  }
  // XX → X_S → G with equal rates: x_s = τ·e^{−τ}
  CHECK(std::abs(prop.evolve({0, 0, 1, 0}, 2.0).x_s - 2.0 * std::exp(-2.0)) < 1e-12);
}

TEST_CASE("scaling and squaring matches the eigendecomposition") {
  for (const auto& c : parameter_sets()) {
    const Eigen::Matrix4d m = rate_matrix(c);
    const CascadePropagator prop(c);
    for (double tau : {0.01, 0.5, 5.0}) {
      const Eigen::Vector4d direct = expm_scaling_squaring(m * tau) * Eigen::Vector4d(1, 0, 0, 0);
      CHECK((direct - prop.evolve({1, 0, 0, 0}, tau).as_vector()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK((expm_scaling_squaring(Eigen::Matrix4d::Zero()) - Eigen::Matrix4d::Identity()).norm() == 0.0);
}

TEST_CASE("rate matrix columns sum to zero") {
  for (const auto& c : parameter_sets()) {
    CHECK(rate_matrix(c).colwise().sum().cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("long-delay convergence to the steady state") {
  for (const auto& c : parameter_sets()) {
    if (c.p == 0.0) continue;
    const Populations ss = steady_state(c).populations;
    const std::array<double, 4> target{ss.x_c, ss.x_s, ss.xx, ss.g};
    const double t0 = 50.0 / min_nonzero_rate(c);
    for (double tau : {t0, 2 * t0, 10 * t0}) {
      CHECK(diff(populations_after_xx(c, tau), target) < 1e-6);
      CHECK(diff(populations_after_x(c, tau), target) < 1e-6);
    }
    CHECK(std::abs(ss.sum() - 1.0) < 1e-14);
    CHECK((rate_matrix(c) * ss.as_vector()).cwiseAbs().maxCoeff() < 1e-12);
  }
}
