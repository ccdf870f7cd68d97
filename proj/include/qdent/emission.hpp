#pragma once

// Mixed two-photon emission model: a mixture of the entangled cascade
// state with maximally mixed light, Gaussian averaging over the nuclear-field
// induced circular splitting, detector-response convolution and the derived
// g² traces, degrees of correlation and Bell-state fidelity.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qdent/cascade.hpp"
#include "qdent/fine_structure.hpp"
#include "qdent/polarization.hpp"

namespace qdent {

struct EmissionParams {
  double s_r = 0.0;             // µeV
  NuclearFieldParams nuclear;   // sigma in µeV
  CascadeParams cascade;        // 1/ns
  double k = 1.0;               // fraction of pairs from the dot
  double irf_fwhm = 0.0;        // ns, pair detector response
  int quadrature_nodes = 64;    // minimum Gauss–Hermite node count

  // Throws std::invalid_argument on any violated constraint; the pump rate
  // must be positive so the long-delay normalization exists.
  void validate() const;
};

enum class Polarity { co, cross };

inline constexpr int kChannelCount = 6;

// Channel order matches the CSV column order:
// rect_co, rect_cross, diag_co, diag_cross, circ_co, circ_cross.
int channel_index(Basis basis, Polarity polarity);
std::string_view channel_name(int index);

using ChannelArray = std::array<std::vector<double>, kChannelCount>;

struct CorrelationSet {
  std::vector<double> tau;  // ns, strictly increasing
  ChannelArray traces;      // g² values
  std::optional<ChannelArray> counts;  // raw coincidences, when histogram data
  std::optional<double> counts_scale;  // counts per unit g²

  std::vector<double>& trace(Basis basis, Polarity polarity) {
    return traces[channel_index(basis, polarity)];
  }
  const std::vector<double>& trace(Basis basis, Polarity polarity) const {
    return traces[channel_index(basis, polarity)];
  }

  // Throws std::invalid_argument if any trace (or counts column) has a
  // different length than the grid.
  void check_consistent() const;
};

struct FidelityTrace {
  std::vector<double> tau;
  std::vector<double> f;
  double peak_tau = 0.0;
  double peak_fidelity = 0.0;
  double duration_above_half = 0.0;  // ns, linear interpolation at crossings
};

// Grid i·step for every integer i with min ≤ i·step ≤ max, so τ = 0 is
// represented exactly whenever the range contains it.
std::vector<double> uniform_tau_grid(double tau_min, double tau_max, double step);

// Intensity-weighted two-photon density matrix for one value of s_c.
//   τ ≥ 0: k·[x_c(τ)·ρ_e(s_r, s_c, τ) + x_s(τ)·ρ_m] + (1 − k)·ρ_m, populations
//          propagated from a coherent exciton;
//   τ < 0: [k·x_s∞·xx(|τ|)/xx∞ + (1 − k)]·ρ_m, populations propagated from
//          the empty dot.
DensityMatrix4 pair_density_unnormalized(const EmissionParams& params, double s_c, double tau);

// Average of pair_density_unnormalized over s_c ~ Normal(0, sigma).
DensityMatrix4 nuclear_averaged_density(const EmissionParams& params, double tau);

// D = (k·x_s∞ + 1 − k)/4, the long-delay projection onto any product ket.
double g2_normalization(const EmissionParams& params);

// Six normalized g² traces before detector convolution. Parallel over the
// grid; the result is bitwise identical to g2_traces_serial.
CorrelationSet g2_traces(const EmissionParams& params, std::span<const double> tau_grid);
CorrelationSet g2_traces_serial(const EmissionParams& params, std::span<const double> tau_grid);

struct ConvolutionResult {
  std::vector<double> values;
  bool unchanged = false;  // width zero or below one grid step
};

// Convolution with a unit-area Gaussian of the given FWHM, truncated at ±5
// standard deviations, padding with the end values.
ConvolutionResult convolve_irf(std::span<const double> trace, double irf_fwhm, double tau_step);
ConvolutionResult convolve_irf_serial(std::span<const double> trace, double irf_fwhm,
                                      double tau_step);

// Applies convolve_irf to all six traces. Throws std::invalid_argument when
// the grid is not uniform.
CorrelationSet convolve_correlations(const CorrelationSet& set, double irf_fwhm,
                                     bool* unchanged = nullptr);

// (co − cross)/(co + cross); throws std::invalid_argument when co + cross ≤ 0.
double degree_of_correlation(double co, double cross);

std::vector<double> degree_of_correlation_trace(const CorrelationSet& set, Basis basis);

// f = (1 + C_rect + C_diag − C_circ)/4 at every grid point. Bins with zero
// total intensity carry no polarization information and count as C = 0.
FidelityTrace fidelity_trace(const CorrelationSet& set);

struct OptimumCorrelation {
  double degree = 0.0;
  double tau = 0.0;
};

// Per basis, the degree of correlation of largest magnitude and its delay.
std::array<OptimumCorrelation, 3> optimum_degrees_of_correlation(const CorrelationSet& set);

struct ScenarioFlags {
  bool no_nuclear = false;  // sigma forced to zero
  bool no_jitter = false;   // detector convolution skipped
};

// g² traces as the detector would record them under the given flags.
CorrelationSet simulate(const EmissionParams& params, std::span<const double> tau_grid,
                        ScenarioFlags flags = {});

struct ScenarioSummary {
  double peak_fidelity = 0.0;
  double peak_tau = 0.0;
  double duration_above_half = 0.0;
};

ScenarioSummary scenario(const EmissionParams& params, std::span<const double> tau_grid,
                         ScenarioFlags flags);

}  // namespace qdent
