#include "qdent/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "qdent/fine_structure.hpp"

namespace qdent {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string header(bool with_counts) {
  std::string h = "tau_ns";
  for (int c = 0; c < kChannelCount; ++c) h += "," + std::string(channel_name(c));
  if (with_counts) {
    for (int c = 0; c < kChannelCount; ++c) h += "," + std::string(channel_name(c)) + "_counts";
    h += ",counts_scale";
  }
  return h;
}

std::string write_rows(const CorrelationSet& set, bool with_counts) {
  set.check_consistent();
  std::string out = header(with_counts) + "\n";
  for (std::size_t i = 0; i < set.tau.size(); ++i) {
    out += fmt("%.10g", set.tau[i]);
    for (int c = 0; c < kChannelCount; ++c) out += "," + fmt("%.6g", set.traces[c][i]);
    if (with_counts) {
      for (int c = 0; c < kChannelCount; ++c) out += "," + fmt("%.17g", (*set.counts)[c][i]);
      out += "," + fmt("%.17g", *set.counts_scale);
    }
    out += "\n";
  }
  return out;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

std::string write_correlations_csv(const CorrelationSet& set) { return write_rows(set, false); }

std::string write_histogram_csv(const CorrelationSet& set) {
  if (!set.counts || !set.counts_scale) {
    throw std::invalid_argument("write_histogram_csv: correlation set has no counts");
  }
  return write_rows(set, true);
}

CorrelationSet load_csv(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    lines.emplace_back(line_no, line);
  }
  if (lines.empty()) throw DataError("empty CSV input");

  const auto names = split(lines.front().second);
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!column.emplace(std::string(names[i]), i).second) {
      throw DataError("bad header: duplicate column '" + std::string(names[i]) + "'");
    }
  }

  std::vector<std::string> known{"tau_ns", "counts_scale"};
  for (int c = 0; c < kChannelCount; ++c) {
    known.emplace_back(channel_name(c));
    known.push_back(std::string(channel_name(c)) + "_counts");
  }
  for (const auto& [name, idx] : column) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw DataError("bad header: unknown column '" + name + "'");
    }
  }
  auto require = [&](const std::string& name) {
    if (!column.count(name)) throw DataError("bad header: missing column '" + name + "'");
  };
  require("tau_ns");
  for (int c = 0; c < kChannelCount; ++c) require(std::string(channel_name(c)));

  bool any_counts = column.count("counts_scale") > 0;
  for (int c = 0; c < kChannelCount; ++c) {
    any_counts = any_counts || column.count(std::string(channel_name(c)) + "_counts");
  }
  if (any_counts) {
    for (int c = 0; c < kChannelCount; ++c) require(std::string(channel_name(c)) + "_counts");
    require("counts_scale");
  }

  CorrelationSet set;
  ChannelArray counts;
  std::optional<double> scale;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto [ln, line] = lines[r];
    const auto cells = split(line);
    if (cells.size() != names.size()) {
      throw DataError("line " + std::to_string(ln) + ": expected " + std::to_string(names.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    auto number = [&](const std::string& name) {
      const std::string_view cell = cells[column.find(name)->second];
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw DataError("line " + std::to_string(ln) + ": non-numeric cell '" + std::string(cell) +
                        "' in column " + name);
      }
      return v;
    };

    const double tau = number("tau_ns");
    if (!set.tau.empty() && !(tau > set.tau.back())) {
      throw DataError("line " + std::to_string(ln) + ": tau_ns is not strictly increasing");
    }
    set.tau.push_back(tau);
    for (int c = 0; c < kChannelCount; ++c) set.traces[c].push_back(number(std::string(channel_name(c))));
    if (any_counts) {
      for (int c = 0; c < kChannelCount; ++c) {
        counts[c].push_back(number(std::string(channel_name(c)) + "_counts"));
      }
      const double s = number("counts_scale");
      if (!(s > 0.0)) throw DataError("line " + std::to_string(ln) + ": counts_scale must be positive");
      if (scale && *scale != s) {
        throw DataError("line " + std::to_string(ln) + ": counts_scale differs between rows");
      }
      scale = s;
    }
  }
  if (set.tau.empty()) throw DataError("CSV has a header but no rows");
  if (any_counts) {
    set.counts = std::move(counts);
    set.counts_scale = scale;
  }
  return set;
}

std::string write_fidelity_csv(const FidelityTrace& trace) {
  std::string out = "tau_ns,fidelity\n";
  for (std::size_t i = 0; i < trace.tau.size(); ++i) {
    out += fmt("%.10g", trace.tau[i]) + "," + fmt("%.6g", trace.f[i]) + "\n";
  }
  return out;
}

std::string write_distribution_csv(std::span<const double> sr_over_sigma, double s_max,
                                   double step) {
  if (sr_over_sigma.empty()) throw std::invalid_argument("write_distribution_csv: no s_r/sigma values");
  for (double v : sr_over_sigma) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("write_distribution_csv: s_r/sigma must be non-negative");
    }
  }
  if (s_max <= 0.0) {
    s_max = *std::max_element(sr_over_sigma.begin(), sr_over_sigma.end()) + 6.0;
  }
  std::string out = "s_over_sigma";
  if (sr_over_sigma.size() == 1) {
    out += ",pdf";
  } else {
    for (double v : sr_over_sigma) out += ",pdf_sr" + fmt("%g", v);
  }
  out += "\n";
  for (long i = 0;; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * step;
    if (x > s_max) break;
    out += fmt("%.10g", x);
    for (double v : sr_over_sigma) out += "," + fmt("%.12g", splitting_pdf(v, 1.0, x));
    out += "\n";
  }
  return out;
}

}  // namespace qdent
