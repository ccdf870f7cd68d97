#include "qdent/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace qdent {

namespace {

constexpr std::string_view kReferenceText = R"(# Reference profile for the d.c.-driven entangled-light-emitting diode
# coincidence data. Keys tagged ASSUMED were not reported with the data; their
# values were chosen so that the simulated fidelity curves and degrees of
# correlation land on the target values. Everything else is measured or
# fitted.

[dot]
s_r_uev = 0.4           # measured rectilinear splitting
sigma_uev = 2.47        # fitted nuclear-field spread of s_c
gamma_x_per_ns = 1      # ASSUMED: exciton radiative rate
gamma_xx_per_ns = 1.5   # ASSUMED: biexciton radiative rate
gamma_s_per_ns = 0      # fitted: no spin scattering required
p_per_ns = 0.2          # ASSUMED: re-excitation rate under d.c. injection

[emission]
k = 0.866               # fitted fraction of pairs from the dot

[detector]
irf_fwhm_ns = 0.5       # ASSUMED: Gaussian pair detector response (FWHM)

[grid]
tau_min_ns = -5
tau_max_ns = 5
tau_step_ns = 0.01

[quadrature]
nodes = 64
)";

enum class Range { any, non_negative, positive, unit_interval, even_nodes };

struct Field {
  std::string_view section;
  std::string_view key;
  bool required;
  Range range;
  std::function<double&(Config&)> ref;  // unused for the integer field
  bool integer = false;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"dot", "s_r_uev", true, Range::non_negative, [](Config& c) -> double& { return c.s_r_uev; }},
      {"dot", "sigma_uev", true, Range::non_negative, [](Config& c) -> double& { return c.sigma_uev; }},
      {"dot", "gamma_x_per_ns", true, Range::positive, [](Config& c) -> double& { return c.gamma_x_per_ns; }},
      {"dot", "gamma_xx_per_ns", true, Range::positive, [](Config& c) -> double& { return c.gamma_xx_per_ns; }},
      {"dot", "gamma_s_per_ns", true, Range::non_negative, [](Config& c) -> double& { return c.gamma_s_per_ns; }},
      {"dot", "p_per_ns", true, Range::positive, [](Config& c) -> double& { return c.p_per_ns; }},
      {"emission", "k", true, Range::unit_interval, [](Config& c) -> double& { return c.k; }},
      {"detector", "irf_fwhm_ns", true, Range::non_negative, [](Config& c) -> double& { return c.irf_fwhm_ns; }},
      {"grid", "tau_min_ns", false, Range::any, [](Config& c) -> double& { return c.tau_min_ns; }},
      {"grid", "tau_max_ns", false, Range::any, [](Config& c) -> double& { return c.tau_max_ns; }},
      {"grid", "tau_step_ns", false, Range::positive, [](Config& c) -> double& { return c.tau_step_ns; }},
      {"quadrature", "nodes", false, Range::even_nodes, nullptr, true},
  };
  return table;
}

std::string qualified(const Field& f) { return std::string(f.section) + "." + std::string(f.key); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const char* range_text(Range r) {
  switch (r) {
    case Range::any: return "finite";
    case Range::non_negative: return ">= 0";
    case Range::positive: return "> 0";
    case Range::unit_interval: return "within [0, 1]";
    case Range::even_nodes: return "an even integer >= 8";
  }
  return "";
}

bool in_range(Range r, double v) {
  if (!std::isfinite(v)) return false;
  switch (r) {
    case Range::any: return true;
    case Range::non_negative: return v >= 0.0;
    case Range::positive: return v > 0.0;
    case Range::unit_interval: return v >= 0.0 && v <= 1.0;
    case Range::even_nodes: return v >= 8.0 && static_cast<long long>(v) % 2 == 0;
  }
  return false;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line),
      key_(std::move(key)) {}

EmissionParams Config::emission_params() const {
  EmissionParams p;
  p.s_r = s_r_uev;
  p.nuclear.sigma = sigma_uev;
  p.cascade.gamma_x = gamma_x_per_ns;
  p.cascade.gamma_xx = gamma_xx_per_ns;
  p.cascade.gamma_s = gamma_s_per_ns;
  p.cascade.p = p_per_ns;
  p.k = k;
  p.irf_fwhm = irf_fwhm_ns;
  p.quadrature_nodes = nodes;
  return p;
}

std::vector<double> Config::tau_grid() const {
  return uniform_tau_grid(tau_min_ns, tau_max_ns, tau_step_ns);
}

Config parse_config(std::string_view text) {
  Config config;
  std::string section;
  std::set<std::string> seen;
  int tau_max_line = 0;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& f : fields()) known = known || f.section == section;
      if (!known) throw ConfigError(line_no, section, "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "", "malformed line, expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(line_no, std::string(key), "key '" + std::string(key) + "' outside any section");
    }

    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (f.section == section && f.key == key) field = &f;
    }
    const std::string name = section + "." + std::string(key);
    if (!field) throw ConfigError(line_no, name, "unknown key '" + name + "'");
    if (!seen.insert(name).second) throw ConfigError(line_no, name, "duplicate key '" + name + "'");

    double v = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    std::from_chars_result res{};
    if (field->integer) {
      long long iv = 0;
      res = std::from_chars(first, last, iv);
      v = static_cast<double>(iv);
    } else {
      res = std::from_chars(first, last, v);
    }
    if (value.empty() || res.ec != std::errc() || res.ptr != last) {
      throw ConfigError(line_no, name, "value of '" + name + "' is not a number: '" +
                                           std::string(value) + "'");
    }
    if (!in_range(field->range, v)) {
      throw ConfigError(line_no, name, "value " + std::string(value) + " of '" + name +
                                           "' is out of range (must be " +
                                           range_text(field->range) + ")");
    }
    if (field->integer) {
      config.nodes = static_cast<int>(v);
    } else {
      field->ref(config) = v;
    }
    if (name == "grid.tau_max_ns") tau_max_line = line_no;
  }

  for (const auto& f : fields()) {
    if (f.required && !seen.count(qualified(f))) {
      throw ConfigError(0, qualified(f), "missing required key '" + qualified(f) + "'");
    }
  }
  if (!(config.tau_max_ns > config.tau_min_ns)) {
    throw ConfigError(tau_max_line, "grid.tau_max_ns", "grid.tau_max_ns must exceed grid.tau_min_ns");
  }
  return config;
}

std::string write_config(const Config& config) {
  std::ostringstream os;
  std::string_view section;
  Config copy = config;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = ";
    if (f.integer) {
      os << copy.nodes;
    } else {
      os << format_double(f.ref(copy));
    }
    os << '\n';
  }
  return os.str();
}

std::string_view reference_config_text() { return kReferenceText; }

Config load_config(const std::string& name_or_path) {
  if (name_or_path == kReferenceProfileName) return parse_config(kReferenceText);
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError(0, "", "cannot open config '" + name_or_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace qdent
