// Data-parallel kernels of the emission model. Each *_serial function is the
// reference the OpenMP version is tested against; both run the same per-point
// code and differ only in how grid points are distributed.

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>

#include "emission_detail.hpp"
#include "qdent/pair_state.hpp"
#include "qdent/quadrature.hpp"

namespace qdent {

namespace detail {

namespace {
constexpr Populations kAfterXX{1.0, 0.0, 0.0, 0.0};
constexpr Populations kAfterX{0.0, 0.0, 0.0, 1.0};
}  // namespace

EmissionContext::EmissionContext(const EmissionParams& params)
    : params_(params), propagator_((params.validate(), params.cascade)) {
  steady_ = steady_state(params_.cascade).populations;
  normalization_ = (params_.k * steady_.x_s + (1.0 - params_.k)) / 4.0;
}

int EmissionContext::averaging_nodes(double tau) const {
  const double sigma = params_.nuclear.sigma;
  if (sigma == 0.0 || tau < 0.0) return 0;
  // Past the point where the coherent term drops below double resolution of
  // the total intensity its average cannot change the result, and the node
  // count it would need grows like τ².
  const Populations pop = propagator_.evolve(kAfterXX, tau);
  const double coherent = params_.k * pop.x_c;
  if (coherent <= 1e-18 * (coherent + params_.k * pop.x_s + 1.0 - params_.k)) return 0;
  return resolved_node_count(params_.quadrature_nodes, sigma, tau);
}

Eigen::Matrix4cd EmissionContext::averaged_entangled(double tau) const {
  const double sigma = params_.nuclear.sigma;
  const int nodes = averaging_nodes(tau);
  if (nodes == 0) {
    const Eigen::Vector4cd a = pair_state(params_.s_r, 0.0, tau).amplitudes;
    return a * a.adjoint();
  }

  const GaussHermiteRule& rule = gauss_hermite(nodes);
  Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Eigen::Vector4cd a = pair_state(params_.s_r, sigma * rule.nodes[i], tau).amplitudes;
    sum.noalias() += rule.weights[i] * (a * a.adjoint());
  }
  return sum;
}

DensityMatrix4 EmissionContext::assemble(const Eigen::Matrix4cd& entangled, double tau) const {
  const double k = params_.k;
  if (tau >= 0.0) {
    const Populations pop = propagator_.evolve(kAfterXX, tau);
    const double mixed_weight = k * pop.x_s + (1.0 - k);
    return DensityMatrix4(k * pop.x_c * entangled +
                          0.25 * mixed_weight * Eigen::Matrix4cd::Identity());
  }
  const Populations pop = propagator_.evolve(kAfterX, -tau);
  const double weight = k * steady_.x_s * pop.xx / steady_.xx + (1.0 - k);
  return weight * DensityMatrix4::maximally_mixed();
}

DensityMatrix4 EmissionContext::averaged_density(double tau) const {
  if (tau < 0.0) return assemble(Eigen::Matrix4cd::Zero(), tau);
  return assemble(averaged_entangled(tau), tau);
}

DensityMatrix4 EmissionContext::density_at(double s_c, double tau) const {
  if (tau < 0.0) return assemble(Eigen::Matrix4cd::Zero(), tau);
  const Eigen::Vector4cd a = pair_state(params_.s_r, s_c, tau).amplitudes;
  return assemble(a * a.adjoint(), tau);
}

void EmissionContext::g2_at(double tau, double* out) const {
  const DensityMatrix4 rho = averaged_density(tau);
  for (Basis basis : kAllBases) {
    const CoCross cc = co_cross(rho, basis);
    out[channel_index(basis, Polarity::co)] = cc.co / normalization_;
    out[channel_index(basis, Polarity::cross)] = cc.cross / normalization_;
  }
}

}  // namespace detail

namespace {

void check_grid(std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw std::invalid_argument("g2_traces: empty delay grid");
  for (std::size_t i = 1; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > tau_grid[i - 1])) {
      throw std::invalid_argument("g2_traces: delay grid is not strictly increasing");
    }
  }
}

CorrelationSet allocate(std::span<const double> tau_grid) {
  CorrelationSet set;
  set.tau.assign(tau_grid.begin(), tau_grid.end());
  for (auto& t : set.traces) t.assign(tau_grid.size(), 0.0);
  return set;
}

// Builds every quadrature rule the grid needs before entering a parallel
// region, so the rule cache is never populated concurrently.
void warm_rules(const detail::EmissionContext& ctx, std::span<const double> tau_grid) {
  std::set<int> counts;
  for (double t : tau_grid) counts.insert(ctx.averaging_nodes(t));
  counts.erase(0);
  for (int n : counts) gauss_hermite(n);
}

struct Kernel {
  std::vector<double> weights;
  int half = 0;
};

std::optional<Kernel> gaussian_kernel(double irf_fwhm, double tau_step) {
  if (!(tau_step > 0.0)) throw std::invalid_argument("convolve_irf: step must be positive");
  if (irf_fwhm < 0.0) throw std::invalid_argument("convolve_irf: negative FWHM");
  if (irf_fwhm == 0.0 || irf_fwhm < tau_step) return std::nullopt;
  const double sd = irf_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  Kernel kernel;
  kernel.half = static_cast<int>(std::floor(5.0 * sd / tau_step));
  kernel.weights.resize(2 * kernel.half + 1);
  double total = 0.0;
  for (int j = -kernel.half; j <= kernel.half; ++j) {
    const double x = j * tau_step / sd;
    kernel.weights[j + kernel.half] = std::exp(-0.5 * x * x);
    total += kernel.weights[j + kernel.half];
  }
  for (double& w : kernel.weights) w /= total;
  return kernel;
}

double convolve_point(std::span<const double> trace, const Kernel& kernel, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(trace.size());
  double acc = 0.0;
  for (int j = -kernel.half; j <= kernel.half; ++j) {
    std::ptrdiff_t idx = i - j;
    idx = idx < 0 ? 0 : (idx >= n ? n - 1 : idx);
    acc += kernel.weights[j + kernel.half] * trace[idx];
  }
  return acc;
}

}  // namespace

CorrelationSet g2_traces(const EmissionParams& params, std::span<const double> tau_grid) {
  check_grid(tau_grid);
  const detail::EmissionContext ctx(params);
  warm_rules(ctx, tau_grid);
  CorrelationSet set = allocate(tau_grid);
  const auto n = static_cast<std::ptrdiff_t>(tau_grid.size());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double values[kChannelCount];
    ctx.g2_at(tau_grid[i], values);
    for (int c = 0; c < kChannelCount; ++c) set.traces[c][i] = values[c];
  }
  return set;
}

CorrelationSet g2_traces_serial(const EmissionParams& params, std::span<const double> tau_grid) {
  check_grid(tau_grid);
  const detail::EmissionContext ctx(params);
  CorrelationSet set = allocate(tau_grid);
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    double values[kChannelCount];
    ctx.g2_at(tau_grid[i], values);
    for (int c = 0; c < kChannelCount; ++c) set.traces[c][i] = values[c];
  }
  return set;
}

ConvolutionResult convolve_irf(std::span<const double> trace, double irf_fwhm, double tau_step) {
  const auto kernel = gaussian_kernel(irf_fwhm, tau_step);
  if (!kernel) return {std::vector<double>(trace.begin(), trace.end()), true};
  ConvolutionResult out;
  out.values.resize(trace.size());
  const auto n = static_cast<std::ptrdiff_t>(trace.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out.values[i] = convolve_point(trace, *kernel, i);
  return out;
}

ConvolutionResult convolve_irf_serial(std::span<const double> trace, double irf_fwhm,
                                      double tau_step) {
  const auto kernel = gaussian_kernel(irf_fwhm, tau_step);
  if (!kernel) return {std::vector<double>(trace.begin(), trace.end()), true};
  ConvolutionResult out;
  out.values.resize(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out.values[i] = convolve_point(trace, *kernel, static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

}  // namespace qdent
