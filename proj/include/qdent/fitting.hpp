#pragma once

// Parameter estimation against coincidence histograms and the synthetic
// histogram generator used for recovery studies.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdent/emission.hpp"

namespace qdent {

enum class FitParameter { k, sigma, gamma_s, gamma_x, gamma_xx, p, irf_fwhm };

inline constexpr std::array<FitParameter, 7> kAllFitParameters = {
    FitParameter::k,        FitParameter::sigma, FitParameter::gamma_s, FitParameter::gamma_x,
    FitParameter::gamma_xx, FitParameter::p,     FitParameter::irf_fwhm};

std::string_view fit_parameter_name(FitParameter parameter);

// Throws std::invalid_argument for unknown names.
FitParameter parse_fit_parameter(std::string_view name);

// Comma-separated list, e.g. "k,sigma,gamma_s".
std::vector<FitParameter> parse_free_list(std::string_view list);

double get_parameter(const EmissionParams& params, FitParameter parameter);
void set_parameter(EmissionParams& params, FitParameter parameter, double value);

struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
};

Bounds default_bounds(FitParameter parameter);

struct FitSpec {
  std::vector<FitParameter> free;
  std::map<FitParameter, Bounds> bounds;  // parameters not listed use default_bounds
  EmissionParams baseline;
  double tolerance = 1e-6;  // objective change, relative to 1 + |objective|
  int max_evals = 4000;

  Bounds bounds_for(FitParameter parameter) const;

  // Throws std::invalid_argument on an empty free set, non-finite or inverted
  // bounds, or k bounds outside [0, 1].
  void validate() const;
};

struct FitEstimate {
  FitParameter parameter;
  double value = 0.0;
  double uncertainty = 0.0;  // one standard deviation from the objective curvature
  Bounds bounds;
};

struct FitResult {
  std::vector<FitEstimate> estimates;  // in kAllFitParameters order
  EmissionParams params;               // baseline with the estimates substituted
  double objective = 0.0;
  int evals = 0;
  bool converged = false;
  std::vector<double> seed_objectives;  // objective at each multi-start point

  const FitEstimate& estimate(FitParameter parameter) const;
};

// Σ (model − data)²/variance over all six traces and bins. With histogram
// counts the residual is taken in count units and variance = max(count, 1);
// otherwise unit variance on the g² values. Throws std::invalid_argument if
// the grids differ.
double chi_square(const CorrelationSet& model, const CorrelationSet& data);

// Model evaluated on the data grid with the detector convolution applied.
double chi_square(const EmissionParams& params, const CorrelationSet& data);

FitResult fit(const CorrelationSet& data, const FitSpec& spec);

// Poisson coincidences with mean exposure·g²(model); traces hold
// counts/exposure. Deterministic for a given seed.
CorrelationSet synth_histogram(const EmissionParams& params, std::span<const double> tau_grid,
                               double exposure_scale, std::uint64_t seed);

// Plain-text report: convergence, objective, evaluations, one line per estimate.
std::string fit_report(const FitResult& result);

}  // namespace qdent
