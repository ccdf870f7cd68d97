#include "qdent/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace qdent {

std::string_view fit_parameter_name(FitParameter parameter) {
  switch (parameter) {
    case FitParameter::k: return "k";
    case FitParameter::sigma: return "sigma";
    case FitParameter::gamma_s: return "gamma_s";
    case FitParameter::gamma_x: return "gamma_x";
    case FitParameter::gamma_xx: return "gamma_xx";
    case FitParameter::p: return "p";
    case FitParameter::irf_fwhm: return "irf_fwhm";
  }
  return "?";
}

FitParameter parse_fit_parameter(std::string_view name) {
  for (FitParameter p : kAllFitParameters) {
    if (fit_parameter_name(p) == name) return p;
  }
  throw std::invalid_argument("unknown fit parameter '" + std::string(name) + "'");
}

std::vector<FitParameter> parse_free_list(std::string_view list) {
  std::vector<FitParameter> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    std::string_view item = list.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse_fit_parameter(item));
    start = comma + 1;
  }
  return out;
}

double get_parameter(const EmissionParams& params, FitParameter parameter) {
  switch (parameter) {
    case FitParameter::k: return params.k;
    case FitParameter::sigma: return params.nuclear.sigma;
    case FitParameter::gamma_s: return params.cascade.gamma_s;
    case FitParameter::gamma_x: return params.cascade.gamma_x;
    case FitParameter::gamma_xx: return params.cascade.gamma_xx;
    case FitParameter::p: return params.cascade.p;
    case FitParameter::irf_fwhm: return params.irf_fwhm;
  }
  throw std::invalid_argument("get_parameter: unknown parameter");
}

void set_parameter(EmissionParams& params, FitParameter parameter, double value) {
  switch (parameter) {
    case FitParameter::k: params.k = value; return;
    case FitParameter::sigma: params.nuclear.sigma = value; return;
    case FitParameter::gamma_s: params.cascade.gamma_s = value; return;
    case FitParameter::gamma_x: params.cascade.gamma_x = value; return;
    case FitParameter::gamma_xx: params.cascade.gamma_xx = value; return;
    case FitParameter::p: params.cascade.p = value; return;
    case FitParameter::irf_fwhm: params.irf_fwhm = value; return;
  }
  throw std::invalid_argument("set_parameter: unknown parameter");
}

Bounds default_bounds(FitParameter parameter) {
  switch (parameter) {
    case FitParameter::k: return {0.0, 1.0};
    case FitParameter::sigma: return {0.05, 10.0};
    case FitParameter::gamma_s: return {0.0, 10.0};
    case FitParameter::gamma_x: return {0.05, 20.0};
    case FitParameter::gamma_xx: return {0.05, 20.0};
    case FitParameter::p: return {0.005, 10.0};
    case FitParameter::irf_fwhm: return {0.0, 3.0};
  }
  return {};
}

Bounds FitSpec::bounds_for(FitParameter parameter) const {
  const auto it = bounds.find(parameter);
  return it == bounds.end() ? default_bounds(parameter) : it->second;
}

void FitSpec::validate() const {
  if (free.empty()) throw std::invalid_argument("FitSpec: no free parameters");
  for (FitParameter p : free) {
    const Bounds b = bounds_for(p);
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
      throw std::invalid_argument("FitSpec: bounds for " + std::string(fit_parameter_name(p)) +
                                  " must be finite with lo < hi");
    }
    if (p == FitParameter::k && (b.lo < 0.0 || b.hi > 1.0)) {
      throw std::invalid_argument("FitSpec: k bounds must lie within [0, 1]");
    }
    if (p != FitParameter::k && b.lo < 0.0) {
      throw std::invalid_argument("FitSpec: negative lower bound for " +
                                  std::string(fit_parameter_name(p)));
    }
  }
  if (!(tolerance > 0.0)) throw std::invalid_argument("FitSpec: tolerance must be positive");
  if (max_evals < 1) throw std::invalid_argument("FitSpec: max_evals must be positive");
}

const FitEstimate& FitResult::estimate(FitParameter parameter) const {
  for (const auto& e : estimates) {
    if (e.parameter == parameter) return e;
  }
  throw std::out_of_range("FitResult: parameter was not fitted");
}

double chi_square(const CorrelationSet& model, const CorrelationSet& data) {
  model.check_consistent();
  data.check_consistent();
  if (model.tau.size() != data.tau.size()) {
    throw std::invalid_argument("chi_square: model and data grids differ in length");
  }
  for (std::size_t i = 0; i < data.tau.size(); ++i) {
    if (std::abs(model.tau[i] - data.tau[i]) > 1e-9 * std::max(1.0, std::abs(data.tau[i]))) {
      throw std::invalid_argument("chi_square: model and data grids differ");
    }
  }
  const bool histogram = data.counts.has_value() && data.counts_scale.has_value();
  double total = 0.0;
  for (int c = 0; c < kChannelCount; ++c) {
    for (std::size_t i = 0; i < data.tau.size(); ++i) {
      if (histogram) {
        const double count = (*data.counts)[c][i];
        const double r = *data.counts_scale * model.traces[c][i] - count;
        total += r * r / std::max(count, 1.0);
      } else {
        const double r = model.traces[c][i] - data.traces[c][i];
        total += r * r;
      }
    }
  }
  return total;
}

double chi_square(const EmissionParams& params, const CorrelationSet& data) {
  return chi_square(simulate(params, data.tau), data);
}

namespace {

bool log_scaled(FitParameter p, const Bounds& b) { return p != FitParameter::k && b.lo > 0.0; }

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Unconstrained search coordinate u ↔ bounded parameter value.
double to_value(FitParameter p, const Bounds& b, double u) {
  const double s = logistic(u);
  if (log_scaled(p, b)) return std::exp(std::log(b.lo) + (std::log(b.hi) - std::log(b.lo)) * s);
  return b.lo + (b.hi - b.lo) * s;
}

double to_search(FitParameter p, const Bounds& b, double value) {
  double s = log_scaled(p, b) ? (std::log(value) - std::log(b.lo)) / (std::log(b.hi) - std::log(b.lo))
                              : (value - b.lo) / (b.hi - b.lo);
  s = std::clamp(s, 1e-12, 1.0 - 1e-12);
  return std::log(s / (1.0 - s));
}

class Objective {
 public:
  Objective(const CorrelationSet& data, const EmissionParams& baseline,
            std::vector<FitParameter> free, std::vector<Bounds> bounds)
      : data_(data), baseline_(baseline), free_(std::move(free)), bounds_(std::move(bounds)) {}

  std::size_t dim() const { return free_.size(); }
  int evals() const { return evals_; }

  EmissionParams params_at_values(const Eigen::VectorXd& values) const {
    EmissionParams p = baseline_;
    for (std::size_t i = 0; i < free_.size(); ++i) set_parameter(p, free_[i], values[i]);
    return p;
  }

  Eigen::VectorXd values_at(const Eigen::VectorXd& u) const {
    Eigen::VectorXd v(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) v[i] = to_value(free_[i], bounds_[i], u[i]);
    return v;
  }

  double at_values(const Eigen::VectorXd& values) {
    ++evals_;
    return chi_square(params_at_values(values), data_);
  }

  double operator()(const Eigen::VectorXd& u) { return at_values(values_at(u)); }

 private:
  const CorrelationSet& data_;
  EmissionParams baseline_;
  std::vector<FitParameter> free_;
  std::vector<Bounds> bounds_;
  int evals_ = 0;
};

struct SimplexOutcome {
  Eigen::VectorXd best;
  double value;
  bool converged;
};

// Nelder–Mead with the standard coefficients; converged when neither the best
// value nor the spread of the simplex moves by more than the tolerance over a
// full cycle of dim + 1 iterations.
SimplexOutcome nelder_mead(Objective& f, const Eigen::VectorXd& start, double start_value,
                           double step, double tolerance, int max_evals) {
  const auto n = static_cast<Eigen::Index>(start.size());
  std::vector<Eigen::VectorXd> pts(n + 1, start);
  std::vector<double> vals(n + 1, start_value);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts[i + 1][i] += step;
    vals[i + 1] = f(pts[i + 1]);
  }

  auto order = [&] {
    std::vector<Eigen::Index> idx(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    for (auto i : idx) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };

  order();
  double cycle_start_best = vals[0];
  int iter = 0;
  while (f.evals() < max_evals) {
    const Eigen::VectorXd centroid = [&] {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) c += pts[i];
      return Eigen::VectorXd(c / static_cast<double>(n));
    }();
    const Eigen::VectorXd reflected = centroid + (centroid - pts[n]);
    const double fr = f(reflected);
    if (fr < vals[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[n]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[n] = expanded;
        vals[n] = fe;
      } else {
        pts[n] = reflected;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = reflected;
      vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      const Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                  : Eigen::VectorXd(centroid + 0.5 * (pts[n] - centroid));
      const double fc = f(contracted);
      if (fc < (outside ? fr : vals[n])) {
        pts[n] = contracted;
        vals[n] = fc;
      } else {
        for (Eigen::Index i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
      }
    }
    order();

    if (++iter % (n + 1) == 0) {
      const double threshold = tolerance * (1.0 + std::abs(vals[0]));
      const bool flat = vals[n] - vals[0] <= threshold;
      const bool stalled = cycle_start_best - vals[0] <= threshold;
      if (flat && stalled) return {pts[0], vals[0], true};
      cycle_start_best = vals[0];
    }
  }
  return {pts[0], vals[0], false};
}

// Hessian of the objective in parameter units by central differences. The
// stencil centre is nudged inwards when a bound is closer than one step.
Eigen::MatrixXd objective_hessian(Objective& f, const Eigen::VectorXd& values,
                                  const std::vector<Bounds>& bounds) {
  const auto n = values.size();
  Eigen::VectorXd h(n), centre = values;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double span = bounds[i].hi - bounds[i].lo;
    h[i] = 1e-3 * std::max(std::abs(values[i]), 0.01 * span);
    centre[i] = std::clamp(values[i], bounds[i].lo + h[i], bounds[i].hi - h[i]);
  }
  auto eval = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Eigen::VectorXd x = centre;
    x[i] += si * h[i];
    x[j] += sj * h[j];
    return f.at_values(x);
  };
  const double f0 = f.at_values(centre);
  Eigen::MatrixXd hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd xp = centre, xm = centre;
    xp[i] += h[i];
    xm[i] -= h[i];
    hess(i, i) = (f.at_values(xp) - 2.0 * f0 + f.at_values(xm)) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = (eval(i, 1, j, 1) - eval(i, 1, j, -1) - eval(i, -1, j, 1) +
                        eval(i, -1, j, -1)) /
                       (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

Eigen::VectorXd uncertainties_from(const Eigen::MatrixXd& hess) {
  const auto n = hess.rows();
  Eigen::VectorXd out(n);
  // χ² = −2 ln L, so the covariance is 2·H⁻¹.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
  const bool pd = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                  (ldlt.vectorD().array() > 0.0).all();
  if (pd) {
    const Eigen::MatrixXd cov = 2.0 * ldlt.solve(Eigen::MatrixXd::Identity(n, n));
    for (Eigen::Index i = 0; i < n; ++i) out[i] = std::sqrt(std::max(cov(i, i), 0.0));
    if ((out.array() > 0.0).all()) return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = hess(i, i) > 0.0 ? std::sqrt(2.0 / hess(i, i))
                              : std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace

FitResult fit(const CorrelationSet& data, const FitSpec& spec) {
  spec.validate();
  spec.baseline.validate();
  data.check_consistent();

  // Canonical parameter order makes the result independent of how the free
  // set was listed.
  std::vector<FitParameter> free;
  for (FitParameter p : kAllFitParameters) {
    if (std::find(spec.free.begin(), spec.free.end(), p) != spec.free.end()) free.push_back(p);
  }
  std::vector<Bounds> bounds;
  for (FitParameter p : free) bounds.push_back(spec.bounds_for(p));
  const auto n = static_cast<Eigen::Index>(free.size());

  Objective objective(data, spec.baseline, free, bounds);

  // Coarse multi-start grid: three levels per parameter, plus the baseline.
  static constexpr std::array<double, 3> kLevels = {0.2, 0.5, 0.8};
  std::vector<Eigen::VectorXd> seeds;
  const auto grid_points = static_cast<long long>(std::pow(3.0, static_cast<double>(n)));
  for (long long g = 0; g < grid_points; ++g) {
    Eigen::VectorXd u(n);
    long long rest = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = kLevels[static_cast<std::size_t>(rest % 3)];
      rest /= 3;
      u[i] = std::log(s / (1.0 - s));
    }
    seeds.push_back(u);
  }
  {
    Eigen::VectorXd u(n);
    bool inside = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = get_parameter(spec.baseline, free[i]);
      inside = inside && v > bounds[i].lo && v < bounds[i].hi;
      u[i] = to_search(free[i], bounds[i], v);
    }
    if (inside) seeds.push_back(u);
  }

  FitResult result;
  Eigen::VectorXd best_u = seeds.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& u : seeds) {
    const double v = objective(u);
    result.seed_objectives.push_back(v);
    if (v < best) {
      best = v;
      best_u = u;
    }
  }

  // Simplex refinement, restarted from the incumbent until a restart no
  // longer improves it.
  bool converged = false;
  double step = 0.6;
  for (int restart = 0; restart < 6 && objective.evals() < spec.max_evals; ++restart) {
    const SimplexOutcome out =
        nelder_mead(objective, best_u, best, step, spec.tolerance, spec.max_evals);
    const double gain = best - out.value;
    if (out.value < best) {
      best = out.value;
      best_u = out.best;
    }
    if (!out.converged) break;
    if (restart > 0 && gain <= spec.tolerance * (1.0 + std::abs(best))) {
      converged = true;
      break;
    }
    step = 0.15;
  }

  const Eigen::VectorXd values = objective.values_at(best_u);
  const int search_evals = objective.evals();
  const Eigen::VectorXd sigma = uncertainties_from(objective_hessian(objective, values, bounds));

  result.params = objective.params_at_values(values);
  result.objective = best;
  result.evals = search_evals;
  result.converged = converged;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.estimates.push_back({free[i], values[i], sigma[i], bounds[i]});
  }
  return result;
}

CorrelationSet synth_histogram(const EmissionParams& params, std::span<const double> tau_grid,
                               double exposure_scale, std::uint64_t seed) {
  if (!(exposure_scale > 0.0)) {
    throw std::invalid_argument("synth_histogram: exposure_scale must be positive");
  }
  CorrelationSet set = simulate(params, tau_grid);
  std::mt19937_64 rng(seed);
  ChannelArray counts;
  for (int c = 0; c < kChannelCount; ++c) {
    counts[c].resize(set.tau.size());
    for (std::size_t i = 0; i < set.tau.size(); ++i) {
      const double mean = exposure_scale * set.traces[c][i];
      long long n = 0;
      if (mean > 0.0) n = std::poisson_distribution<long long>(mean)(rng);
      counts[c][i] = static_cast<double>(n);
      set.traces[c][i] = static_cast<double>(n) / exposure_scale;
    }
  }
  set.counts = std::move(counts);
  set.counts_scale = exposure_scale;
  return set;
}

std::string fit_report(const FitResult& result) {
  std::ostringstream os;
  char buf[160];
  os << "status: " << (result.converged ? "converged" : "not converged") << '\n';
  std::snprintf(buf, sizeof buf, "objective: %.10g\n", result.objective);
  os << buf << "evaluations: " << result.evals << '\n';
  for (const auto& e : result.estimates) {
    std::snprintf(buf, sizeof buf, "%s = %.6g +/- %.3g", std::string(fit_parameter_name(e.parameter)).c_str(),
                  e.value, e.uncertainty);
    os << buf;
    if (e.parameter == FitParameter::gamma_s && e.value - 2.0 * e.uncertainty <= e.bounds.lo) {
      os << "  (consistent with no spin-scattering)";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qdent
