#pragma once

// CSV exchange formats.
//
// Correlations: tau_ns,rect_co,rect_cross,diag_co,diag_cross,circ_co,circ_cross
// Histograms:   the same columns followed by <channel>_counts for all six
//               channels and counts_scale (counts per unit g²).
// Fidelity:     tau_ns,fidelity
// Distribution: s_over_sigma,pdf (one pdf column per requested s_r/σ when
//               several are given, named pdf_sr<value>)

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qdent/emission.hpp"

namespace qdent {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// g² values with 6 significant digits; one row per grid point.
std::string write_correlations_csv(const CorrelationSet& set);

// Correlations plus raw counts (exact) and counts_scale. Throws
// std::invalid_argument if the set carries no counts.
std::string write_histogram_csv(const CorrelationSet& set);

// Parses either layout. Throws DataError naming the offending column or line.
CorrelationSet load_csv(std::string_view text);

std::string write_fidelity_csv(const FidelityTrace& trace);

// Density of |S|/σ (dimensionless) on the grid s/σ = (i + ½)·step, which never
// lands exactly on a singular edge for s_r/σ values with two decimals.
std::string write_distribution_csv(std::span<const double> sr_over_sigma, double s_max = 0.0,
                                   double step = 0.01);

}  // namespace qdent
