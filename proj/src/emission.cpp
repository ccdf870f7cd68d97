#include "qdent/emission.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "emission_detail.hpp"

namespace qdent {

void EmissionParams::validate() const {
  if (!std::isfinite(s_r) || s_r < 0.0) {
    throw std::invalid_argument("EmissionParams: s_r must be finite and non-negative");
  }
  if (!std::isfinite(nuclear.sigma) || nuclear.sigma < 0.0) {
    throw std::invalid_argument("EmissionParams: sigma must be finite and non-negative");
  }
  cascade.validate();
  if (!(cascade.p > 0.0)) throw std::invalid_argument("EmissionParams: p must be positive");
  if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("EmissionParams: k outside [0, 1]");
  if (!std::isfinite(irf_fwhm) || irf_fwhm < 0.0) {
    throw std::invalid_argument("EmissionParams: irf_fwhm must be finite and non-negative");
  }
  if (quadrature_nodes < 8 || quadrature_nodes % 2 != 0) {
    throw std::invalid_argument("EmissionParams: quadrature_nodes must be even and >= 8");
  }
}

int channel_index(Basis basis, Polarity polarity) {
  return 2 * static_cast<int>(basis) + (polarity == Polarity::co ? 0 : 1);
}

std::string_view channel_name(int index) {
  static constexpr std::array<std::string_view, kChannelCount> names = {
      "rect_co", "rect_cross", "diag_co", "diag_cross", "circ_co", "circ_cross"};
  return names.at(static_cast<std::size_t>(index));
}

void CorrelationSet::check_consistent() const {
  for (const auto& t : traces) {
    if (t.size() != tau.size()) {
      throw std::invalid_argument("CorrelationSet: trace length differs from the delay grid");
    }
  }
  if (counts) {
    for (const auto& c : *counts) {
      if (c.size() != tau.size()) {
        throw std::invalid_argument("CorrelationSet: counts length differs from the delay grid");
      }
    }
  }
}

std::vector<double> uniform_tau_grid(double tau_min, double tau_max, double step) {
  if (!(step > 0.0) || !(tau_max > tau_min)) {
    throw std::invalid_argument("uniform_tau_grid: need step > 0 and tau_max > tau_min");
  }
  const auto first = static_cast<long long>(std::ceil(tau_min / step - 1e-9));
  const auto last = static_cast<long long>(std::floor(tau_max / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(std::max(0LL, last - first + 1)));
  for (long long i = first; i <= last; ++i) grid.push_back(static_cast<double>(i) * step);
  return grid;
}

DensityMatrix4 pair_density_unnormalized(const EmissionParams& params, double s_c, double tau) {
  return detail::EmissionContext(params).density_at(s_c, tau);
}

DensityMatrix4 nuclear_averaged_density(const EmissionParams& params, double tau) {
  return detail::EmissionContext(params).averaged_density(tau);
}

double g2_normalization(const EmissionParams& params) {
  return detail::EmissionContext(params).normalization();
}

CorrelationSet convolve_correlations(const CorrelationSet& set, double irf_fwhm, bool* unchanged) {
  set.check_consistent();
  if (set.tau.size() < 2) throw std::invalid_argument("convolve_correlations: grid too short");
  const double step = (set.tau.back() - set.tau.front()) / static_cast<double>(set.tau.size() - 1);
  for (std::size_t i = 1; i < set.tau.size(); ++i) {
    if (std::abs((set.tau[i] - set.tau[i - 1]) - step) > 1e-6 * step) {
      throw std::invalid_argument("convolve_correlations: delay grid is not uniform");
    }
  }
  CorrelationSet out = set;
  bool flagged = false;
  for (int c = 0; c < kChannelCount; ++c) {
    ConvolutionResult r = convolve_irf(set.traces[c], irf_fwhm, step);
    flagged = flagged || r.unchanged;
    out.traces[c] = std::move(r.values);
  }
  if (unchanged) *unchanged = flagged;
  return out;
}

double degree_of_correlation(double co, double cross) {
  const double total = co + cross;
  if (!(total > 0.0)) {
    throw std::invalid_argument("degree_of_correlation: co + cross must be positive");
  }
  return (co - cross) / total;
}

std::vector<double> degree_of_correlation_trace(const CorrelationSet& set, Basis basis) {
  set.check_consistent();
  const auto& co = set.trace(basis, Polarity::co);
  const auto& cross = set.trace(basis, Polarity::cross);
  std::vector<double> out(set.tau.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = degree_of_correlation(co[i], cross[i]);
  return out;
}

FidelityTrace fidelity_trace(const CorrelationSet& set) {
  set.check_consistent();
  if (set.tau.empty()) throw std::invalid_argument("fidelity_trace: empty grid");

  auto degree = [&](Basis b, std::size_t i) {
    const double co = set.trace(b, Polarity::co)[i];
    const double cross = set.trace(b, Polarity::cross)[i];
    return co + cross > 0.0 ? degree_of_correlation(co, cross) : 0.0;
  };

  FidelityTrace out;
  out.tau = set.tau;
  out.f.resize(set.tau.size());
  for (std::size_t i = 0; i < out.f.size(); ++i) {
    out.f[i] = 0.25 * (1.0 + degree(Basis::rectilinear, i) + degree(Basis::diagonal, i) -
                       degree(Basis::circular, i));
  }

  const auto peak = std::max_element(out.f.begin(), out.f.end());
  out.peak_fidelity = *peak;
  out.peak_tau = out.tau[static_cast<std::size_t>(peak - out.f.begin())];

  double duration = 0.0;
  for (std::size_t i = 1; i < out.f.size(); ++i) {
    const double f0 = out.f[i - 1] - 0.5;
    const double f1 = out.f[i] - 0.5;
    const double dt = out.tau[i] - out.tau[i - 1];
    if (f0 > 0.0 && f1 > 0.0) {
      duration += dt;
    } else if (f0 > 0.0 || f1 > 0.0) {
      const double above = std::max(f0, f1);
      duration += dt * above / (std::abs(f0) + std::abs(f1));
    }
  }
  out.duration_above_half = duration;
  return out;
}

std::array<OptimumCorrelation, 3> optimum_degrees_of_correlation(const CorrelationSet& set) {
  std::array<OptimumCorrelation, 3> out{};
  for (Basis basis : kAllBases) {
    const auto& co = set.trace(basis, Polarity::co);
    const auto& cross = set.trace(basis, Polarity::cross);
    OptimumCorrelation best;
    for (std::size_t i = 0; i < set.tau.size(); ++i) {
      if (!(co[i] + cross[i] > 0.0)) continue;
      const double c = degree_of_correlation(co[i], cross[i]);
      if (std::abs(c) > std::abs(best.degree)) best = {c, set.tau[i]};
    }
    out[static_cast<std::size_t>(basis)] = best;
  }
  return out;
}

CorrelationSet simulate(const EmissionParams& params, std::span<const double> tau_grid,
                        ScenarioFlags flags) {
  EmissionParams p = params;
  if (flags.no_nuclear) p.nuclear.sigma = 0.0;
  CorrelationSet set = g2_traces(p, tau_grid);
  if (flags.no_jitter || p.irf_fwhm == 0.0) return set;
  return convolve_correlations(set, p.irf_fwhm);
}

ScenarioSummary scenario(const EmissionParams& params, std::span<const double> tau_grid,
                         ScenarioFlags flags) {
  const FidelityTrace f = fidelity_trace(simulate(params, tau_grid, flags));
  return {f.peak_fidelity, f.peak_tau, f.duration_above_half};
}

}  // namespace qdent
