#include "qdent/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qdent/units.hpp"

namespace qdent {

namespace {

struct HermiteValues {
  double p_n;        // scaled orthonormal Hermite polynomial of degree n
  double p_nm1;      // same scaling, degree n − 1
  double log_scale;  // true value = scaled · exp(log_scale)
};

// Orthonormal Hermite polynomials (weight e^{−x²}) by three-term recurrence,
// rescaled on the fly so large |x| neither overflows nor underflows.
// a[j] = √(2/j), b[j] = √((j−1)/j).
HermiteValues hermite_recurrence(const std::vector<double>& a, const std::vector<double>& b, double x) {
  const int n = static_cast<int>(a.size()) - 1;
  double p_prev = 0.0;
  double p = std::pow(std::numbers::pi, -0.25);
  double log_scale = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double next = x * a[j] * p - b[j] * p_prev;
    p_prev = p;
    p = next;
    if (std::abs(p) > 1e150) {
      p *= 1e-150;
      p_prev *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  return {p, p_prev, log_scale};
}

// Positive zeros of H_n, ascending, from the Jacobi matrix eigenvalues.
std::vector<double> golub_welsch_guess(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 0; i < n - 1; ++i) sub[i] = std::sqrt(0.5 * (i + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_hermite: tridiagonal eigensolver failed");
  }
  const int half = n / 2;
  std::vector<double> guess(half);
  for (int i = 0; i < half; ++i) guess[i] = std::abs(solver.eigenvalues()[half + i]);
  return guess;
}

// Positive zeros of H_n (n even), ascending, from asymptotic expansions:
// Tricomi in the bulk, Gatteschi (Airy-type) for the largest ones.
std::vector<double> asymptotic_guess(int n) {
  const int m = n / 2;
  const double nu = 2.0 * n + 1.0;
  std::vector<double> guess(m);

  for (int k = 1; k <= m; ++k) {
    const double rhs = (4.0 * m - 4.0 * k + 3.0) / nu * std::numbers::pi;
    double t = std::numbers::pi / 2;
    for (int it = 0; it < 10; ++it) t -= (t - std::sin(t) - rhs) / (1.0 - std::cos(t));
    const double c = std::cos(t / 2) * std::cos(t / 2);
    guess[k - 1] = std::sqrt(nu * c - (5.0 / (4.0 * (1 - c) * (1 - c)) - 1.0 / (1 - c) - 1.0 + 0.75) / (3.0 * nu));
  }

  static constexpr double kAiryZeros[] = {-2.338107410459767, -4.087949444130971, -5.520559828095551,
                                          -6.786708090071759, -7.944133587120853, -9.022650853340980,
                                          -10.04017434155809, -11.00852430373326, -11.93601556323626,
                                          -12.82877675286576};
  const int airy_count = std::max(1, m - static_cast<int>(0.4985 * n + 1e-9) + 1);
  for (int k = 1; k <= std::min(airy_count, m); ++k) {
    double ai;
    if (k <= 10) {
      ai = kAiryZeros[k - 1];
    } else {
      const double t = 3.0 / 8.0 * std::numbers::pi * (4.0 * k - 1.0);
      ai = -std::pow(t, 2.0 / 3.0) * (1 + 5.0 / 48 / (t * t) - 5.0 / 36 / std::pow(t, 4));
    }
    const double x2 = nu + std::cbrt(4.0) * ai * std::cbrt(nu) + 0.2 * std::cbrt(16.0) * ai * ai / std::cbrt(nu) +
                      (11.0 / 35 - 0.25 - 12.0 / 175 * ai * ai * ai) / nu;
    guess[m - k] = std::sqrt(std::abs(x2));
  }
  return guess;
}

}  // namespace

GaussHermiteRule build_gauss_hermite(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("gauss_hermite: node count must be even and >= 2");
  }

  // Jacobi eigenvalues are O(n²) with a large constant; past a few hundred
  // nodes the asymptotic zeros are close enough for Newton.
  const std::vector<double> guess = n <= 256 ? golub_welsch_guess(n) : asymptotic_guess(n);

  std::vector<double> a(n + 1), b(n + 1);
  for (int j = 1; j <= n; ++j) {
    a[j] = std::sqrt(2.0 / j);
    b[j] = std::sqrt((j - 1.0) / j);
  }

  const int half = n / 2;
  std::vector<double> pos_nodes(half), pos_log_weights(half);
  int unconverged = 0;
#pragma omp parallel for schedule(static) reduction(+ : unconverged) if (n > 256)
  for (int i = 0; i < half; ++i) {
    double x = guess[i];
    // Newton polish; the step is a ratio, so the running scale cancels.
    bool done = false;
    for (int iter = 0; iter < 8 && !done; ++iter) {
      const HermiteValues h = hermite_recurrence(a, b, x);
      const double step = h.p_n / (std::sqrt(2.0 * n) * h.p_nm1);
      x -= step;
      done = std::abs(step) <= 1e-15 * std::max(1.0, x);
    }
    unconverged += !done;
    const HermiteValues h = hermite_recurrence(a, b, x);
    pos_nodes[i] = x;
    // w = 1/(n·p_{n−1}(x)²) for ∫e^{−x²}; the extra 1/√π normalizes to unit mass.
    pos_log_weights[i] = -std::log(static_cast<double>(n)) -
                         2.0 * (std::log(std::abs(h.p_nm1)) + h.log_scale) -
                         0.5 * std::log(std::numbers::pi);
  }
  // m distinct converged positive zeros are all of them.
  bool ascending = pos_nodes[0] > 0.0;
  for (int i = 1; i < half; ++i) ascending = ascending && pos_nodes[i] > pos_nodes[i - 1];
  if (unconverged > 0 || !ascending) {
    throw std::runtime_error("gauss_hermite: Newton iteration failed to isolate the zeros");
  }

  // Rescale to unit mass; removes the O(1e-16·n) drift of the closed form.
  double mass = 0.0;
  for (int i = half - 1; i >= 0; --i) mass += 2.0 * std::exp(pos_log_weights[i]);
  if (std::abs(mass - 1.0) > 1e-8) throw std::runtime_error("gauss_hermite: weights lost normalization");

  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < half; ++i) {
    const double z = std::numbers::sqrt2 * pos_nodes[i];
    const double w = std::exp(pos_log_weights[i]) / mass;
    rule.nodes[half + i] = z;
    rule.nodes[half - 1 - i] = -z;
    rule.weights[half + i] = w;
    rule.weights[half - 1 - i] = w;
  }
  return rule;
}

const GaussHermiteRule& gauss_hermite(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<const GaussHermiteRule>(build_gauss_hermite(n))).first;
  }
  return *it->second;
}

int resolved_node_count(int requested, double sigma, double tau) {
  const double omega = std::numbers::sqrt2 * sigma * std::abs(tau) / kHbar;
  const double needed = omega * omega / 3.0 + 32.0;
  int n = requested;
  while (n < needed && n < (1 << 20)) n *= 2;
  return n;
}

}  // namespace qdent
