#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qdent/config.hpp"
#include "qdent/csv.hpp"
#include "qdent/emission.hpp"

using namespace qdent;

namespace {

std::string replace_line(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

int line_of(const std::string& text, const std::string& needle) {
  const auto pos = text.find(needle);
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

template <typename F>
std::string config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

template <typename F>
std::string data_error(F&& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

const std::string kReference(reference_config_text());

}  // namespace

TEST_CASE("reference profile") {
  const Config c = parse_config(kReference);
  CHECK(c.k == 0.866);
  CHECK(c.s_r_uev == 0.4);
  CHECK(c.sigma_uev == 2.47);
  CHECK(c.gamma_s_per_ns == 0.0);
  CHECK(c.nodes == 64);
  CHECK(c.tau_grid().size() == 1001);
  const EmissionParams p = c.emission_params();
  CHECK(p.nuclear.sigma == 2.47);
  CHECK(p.cascade.p == c.p_per_ns);
  CHECK(p.irf_fwhm == c.irf_fwhm_ns);
  CHECK(load_config(std::string(kReferenceProfileName)) == c);

  std::ifstream in(QDENT_SOURCE_DIR "/configs/salter2010_assumed.cfg");
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == kReference);
  CHECK(load_config(QDENT_SOURCE_DIR "/configs/salter2010_assumed.cfg") == c);

  // every assumed value carries a tag
  for (const std::string key : {"gamma_x_per_ns", "gamma_xx_per_ns", "p_per_ns", "irf_fwhm_ns"}) {
    const auto pos = kReference.find(key + " =");
    REQUIRE(pos != std::string::npos);
    const std::string line = kReference.substr(pos, kReference.find('\n', pos) - pos);
    CHECK(line.find("ASSUMED") != std::string::npos);
  }
}

TEST_CASE("config errors") {
  const std::string k_bad = replace_line(kReference, "k = 0.866", "k = 1.2");
  const std::string msg = config_error([&] { parse_config(k_bad); });
  CHECK(msg.find("emission.k") != std::string::npos);
  CHECK(msg.find("line " + std::to_string(line_of(k_bad, "k = 1.2"))) != std::string::npos);

  const std::string typo = replace_line(kReference, "sigma_uev", "sigm_uev");
  CHECK(config_error([&] { parse_config(typo); }).find("unknown key") != std::string::npos);

  const std::string missing = replace_line(kReference, "p_per_ns = 0.2", "");
  CHECK(config_error([&] { parse_config(missing); }).find("dot.p_per_ns") != std::string::npos);

  CHECK(config_error([&] { parse_config(replace_line(kReference, "k = 0.866", "k 0.866")); })
            .find("malformed") != std::string::npos);
  CHECK(config_error([&] { parse_config(replace_line(kReference, "k = 0.866", "k = abc")); })
            .find("not a number") != std::string::npos);
  CHECK(config_error([&] { parse_config(replace_line(kReference, "[detector]", "[detectors]")); })
            .find("unknown section") != std::string::npos);
  CHECK(config_error([&] { parse_config(kReference + "\n[emission]\nk = 0.5\n"); }).find("duplicate") !=
        std::string::npos);
  CHECK(config_error([&] { parse_config("s_r_uev = 1\n" + kReference); }).find("outside") != std::string::npos);
  CHECK(config_error([&] { parse_config(replace_line(kReference, "nodes = 64", "nodes = 7")); }) != "");
  CHECK(config_error([&] { parse_config(replace_line(kReference, "p_per_ns = 0.2", "p_per_ns = 0")); }) != "");
  CHECK(config_error([&] { parse_config(replace_line(kReference, "sigma_uev = 2.47", "sigma_uev = -1")); }) !=
        "");
  CHECK(config_error([&] { parse_config(replace_line(kReference, "tau_max_ns = 5", "tau_max_ns = -6")); })
            .find("tau_max_ns") != std::string::npos);
  CHECK(config_error([&] { load_config("/nonexistent/profile.cfg"); }).find("cannot open") != std::string::npos);
}

TEST_CASE("config round trip") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    Config c;
    c.s_r_uev = 5 * u(rng);
    c.sigma_uev = 10 * u(rng);
    c.gamma_x_per_ns = 0.01 + 5 * u(rng);
    c.gamma_xx_per_ns = 0.01 + 5 * u(rng);
    c.gamma_s_per_ns = u(rng) < 0.3 ? 0.0 : u(rng);
    c.p_per_ns = 1e-3 + u(rng);
    c.k = u(rng);
    c.irf_fwhm_ns = u(rng);
    c.tau_min_ns = -20 * u(rng) - 0.1;
    c.tau_max_ns = 20 * u(rng) + 0.1;
    c.tau_step_ns = 1e-3 + 0.05 * u(rng);
    c.nodes = 8 + 2 * static_cast<int>(100 * u(rng));
    CHECK(parse_config(write_config(c)) == c);
  }
  CHECK(parse_config(write_config(parse_config(kReference))) == parse_config(kReference));
}

TEST_CASE("correlations CSV") {
  EmissionParams p = parse_config(kReference).emission_params();
  const CorrelationSet small = g2_traces(p, std::vector<double>{-1.0, 0.0, 1.0});
  const std::string text = write_correlations_csv(small);
  const auto rows = lines(text);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "tau_ns,rect_co,rect_cross,diag_co,diag_cross,circ_co,circ_cross");

  const auto grid = uniform_tau_grid(-100, 100, 0.5);
  const CorrelationSet set = simulate(p, grid);
  const CorrelationSet back = load_csv(write_correlations_csv(set));
  REQUIRE(back.tau.size() == grid.size());
  CHECK_FALSE(back.counts.has_value());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(back.tau[i] - grid[i]) < 1e-9);
    for (int c = 0; c < kChannelCount; ++c) {
      CHECK(std::abs(back.traces[c][i] / set.traces[c][i] - 1) < 1e-5);
    }
  }
  const auto long_rows = lines(write_correlations_csv(set));
  for (const std::string& row : {long_rows[1], long_rows.back()}) {
    CHECK(row.substr(row.find(',')) == ",1,1,1,1,1,1");
  }
}

TEST_CASE("histogram CSV round trip") {
  CorrelationSet s;
  s.tau = {-0.5, 0.0, 0.5};
  ChannelArray counts;
  for (int c = 0; c < kChannelCount; ++c) {
    counts[c] = {1000.0 + c, 0.0, 123456789.0};
    s.traces[c] = {counts[c][0] / 1e4, 0.0, counts[c][2] / 1e4};
  }
  s.counts = counts;
  s.counts_scale = 1e4;
  const CorrelationSet back = load_csv(write_histogram_csv(s));
  REQUIRE(back.counts.has_value());
  CHECK(*back.counts == counts);
  CHECK(*back.counts_scale == 1e4);
  CHECK_THROWS_AS(write_histogram_csv(g2_traces(parse_config(kReference).emission_params(),
                                                std::vector<double>{0.0})),
                  std::invalid_argument);
}

TEST_CASE("CSV errors") {
  const std::string good =
      "tau_ns,rect_co,rect_cross,diag_co,diag_cross,circ_co,circ_cross\n"
      "0,1,1,1,1,1,1\n"
      "1,1,1,1,1,1,1\n";
  CHECK(load_csv(good).tau.size() == 2);
  const std::string shuffled =
      "tau_ns,rect_co,rect_cross,diag_co,diag_cross,circ_co,circ_cross\n"
      "1,1,1,1,1,1,1\n"
      "0,1,1,1,1,1,1\n";
  CHECK(data_error([&] { load_csv(shuffled); }).find("not strictly increasing") != std::string::npos);
  const std::string missing =
      "tau_ns,rect_co,rect_cross,diag_co,circ_co,circ_cross\n"
      "0,1,1,1,1,1\n";
  CHECK(data_error([&] { load_csv(missing); }).find("diag_cross") != std::string::npos);
  CHECK(data_error([&] { load_csv(replace_line(good, "0,1,1", "0,x,1")); }).find("non-numeric") !=
        std::string::npos);
  CHECK(data_error([&] { load_csv(replace_line(good, "circ_cross", "circ_cros")); }).find("unknown column") !=
        std::string::npos);
  CHECK(data_error([&] { load_csv(replace_line(good, "0,1,1,1,1,1,1", "0,1,1")); }).find("line 2") !=
        std::string::npos);
  CHECK(data_error([&] { load_csv(""); }) != "");
}

TEST_CASE("fidelity CSV") {
  FidelityTrace f;
  f.tau = {-0.01, 0.0};
  f.f = {0.25, 0.8995};
  const auto rows = lines(write_fidelity_csv(f));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "tau_ns,fidelity");
}

TEST_CASE("distribution CSV matches the half-normal density") {
  const std::vector<double> ratios = {0.0};
  const auto rows = lines(write_distribution_csv(ratios));
  CHECK(rows[0] == "s_over_sigma,pdf");
  REQUIRE(rows.size() > 100);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    const double x = std::stod(rows[i].substr(0, comma));
    const double pdf = std::stod(rows[i].substr(comma + 1));
    CHECK(std::abs(pdf - oracle::half_normal_pdf(1.0, x)) < 1e-9);
  }
  const std::vector<double> several = {0.0, 2.0};
  const auto multi = lines(write_distribution_csv(several));
  CHECK(multi[0] == "s_over_sigma,pdf_sr0,pdf_sr2");
}
