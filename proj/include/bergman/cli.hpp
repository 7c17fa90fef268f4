#pragma once

// Experiment driver: a single JSON config selects a command, its inputs and
// the output directory contents (report.json, plus rows.csv / plot.svg for
// tabular commands).

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/errors.hpp"
#include "bergman/report.hpp"
#include "bergman/series_json.hpp"
#include "bergman/spaces.hpp"
#include "bergman/verify.hpp"
#include "bergman/weights.hpp"

namespace bergman::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum class ExitCode : int { ok = 0, validation = 2, numerical = 3 };

enum class Command { norm, check_condition, find_k, check_monotone, dilate_converge, taylor_error, density };

inline Command command_from_string(const std::string& s) {
  if (s == "norm") return Command::norm;
  if (s == "check-condition") return Command::check_condition;
  if (s == "find-k") return Command::find_k;
  if (s == "check-monotone") return Command::check_monotone;
  if (s == "dilate-converge") return Command::dilate_converge;
  if (s == "taylor-error") return Command::taylor_error;
  if (s == "density") return Command::density;
  throw invalid_argument_error("unknown command '" + s + "'");
}

inline NormKind norm_kind_from_string(const std::string& s) {
  for (auto k : {NormKind::bergman_polydisk, NormKind::bergman_ball, NormKind::besov_ball, NormKind::dirichlet_ball,
                 NormKind::radial_besov_polydisk, NormKind::angular_exact, NormKind::product_exact})
    if (to_string(k) == s) return k;
  throw invalid_argument_error("unknown norm kind '" + s + "'");
}

struct RunOptions {
  unsigned workers = 1;
  bool reproducible = false;
  bool plot = true;
};

// Fully validated configuration. Fields not used by the command stay empty.
struct RunConfig {
  Command command;
  std::string command_name;
  std::size_t dimension = 1;
  std::optional<Weight> weight;
  std::optional<NormSpec> norm;
  std::optional<PowerSeries> series;
  std::vector<double> radii;
  std::vector<unsigned> degrees;
  double r = 0.99;
  unsigned k = 0;
  unsigned k_max = 8;
  double r0 = 0.5;
  double bound = 1e6;
  ConditionGrid condition_grid;
  MonotoneGrid monotone_grid;
  ConvergenceOptions convergence;
};

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline Weight parse_weight_source(const json& j, std::size_t n) {
  if (j.is_string()) return weight_from_name(j.get<std::string>(), n);
  if (!j.is_object() || !j.contains("name")) throw invalid_argument_error("weight must be a name or {\"name\": ...}");
  return weight_from_name(j.at("name").get<std::string>(), n, get_or(j, "alpha", 0.0), get_or(j, "beta", 1.0));
}

inline QuadratureSpec parse_quadrature(const json& j, std::uint64_t seed) {
  QuadratureSpec q;
  q.seed = seed;
  if (j.is_null()) return q;
  q.radial_nodes = get_or<std::size_t>(j, "radial_nodes", q.radial_nodes);
  q.angular_nodes = get_or<std::size_t>(j, "angular_nodes", q.angular_nodes);
  q.sphere_samples = get_or<std::size_t>(j, "sphere_samples", q.sphere_samples);
  q.seed = get_or<std::uint64_t>(j, "seed", q.seed);
  q.validate();
  return q;
}

inline Domain parse_domain(const std::string& s) {
  if (s == "polydisk") return Domain::polydisk;
  if (s == "ball") return Domain::ball;
  throw invalid_argument_error("unknown domain '" + s + "'");
}

inline void require(const json& cfg, const char* key, const std::string& command) {
  if (!cfg.contains(key)) throw invalid_argument_error("command '" + command + "' requires \"" + key + "\"");
}

}  // namespace detail

// Validates a config document. base_dir resolves relative "series_file" paths.
inline RunConfig parse_config(const json& cfg, const fs::path& base_dir = ".") {
  try {
    if (!cfg.is_object()) throw invalid_argument_error("config must be a JSON object");
    RunConfig rc;
    detail::require(cfg, "command", "any");
    rc.command_name = cfg.at("command").get<std::string>();
    rc.command = command_from_string(rc.command_name);
    const auto dim = cfg.value("dimension", 1LL);
    if (dim <= 0) throw invalid_argument_error("dimension must be positive");
    rc.dimension = static_cast<std::size_t>(dim);
    const auto seed = detail::get_or<std::uint64_t>(cfg, "seed", 0);

    const bool needs_series = rc.command == Command::norm || rc.command == Command::dilate_converge ||
                              rc.command == Command::taylor_error || rc.command == Command::density;
    detail::require(cfg, "weight", rc.command_name);
    rc.weight = detail::parse_weight_source(cfg.at("weight"), rc.dimension);

    if (needs_series) {
      if (cfg.contains("series")) {
        rc.series = series_from_json(cfg.at("series"));
      } else if (cfg.contains("series_file")) {
        const fs::path p = base_dir / cfg.at("series_file").get<std::string>();
        std::ifstream in(p);
        if (!in) throw invalid_argument_error("cannot read series file " + p.string());
        json sj;
        try {
          sj = json::parse(in);
        } catch (const json::parse_error& e) {
          throw invalid_argument_error("series file " + p.string() + ": " + e.what());
        }
        rc.series = series_from_json(sj);
      } else {
        throw invalid_argument_error("command '" + rc.command_name + "' requires \"series\" or \"series_file\"");
      }
      if (rc.series->dimension() != rc.dimension) throw invalid_argument_error("series dimension differs from config dimension");

      detail::require(cfg, "norm", rc.command_name);
      const json& nj = cfg.at("norm");
      NormSpec s{rc.dimension, norm_kind_from_string(nj.at("kind").get<std::string>()), *rc.weight};
      s.p = detail::get_or(nj, "p", 2.0);
      s.alpha = detail::get_or(nj, "alpha", 0.0);
      const auto N = detail::get_or<long long>(nj, "N", 1);
      if (N <= 0) throw invalid_spec_error("N must be a positive integer");
      s.N = static_cast<unsigned>(N);
      s.rho_max = detail::get_or(nj, "rho_max", kDefaultRhoMax);
      s.seminorm = detail::get_or(nj, "seminorm", false);
      s.estimate_error = detail::get_or(nj, "estimate_error", true);
      s.quadrature = detail::parse_quadrature(cfg.contains("quadrature") ? cfg.at("quadrature") : json(), seed);
      s.validate();
      rc.norm = std::move(s);
    }

    switch (rc.command) {
      case Command::dilate_converge: {
        detail::require(cfg, "radii", rc.command_name);
        rc.radii = cfg.at("radii").get<std::vector<double>>();
        for (std::size_t i = 0; i < rc.radii.size(); ++i) {
          if (!(rc.radii[i] > 0.0 && rc.radii[i] < 1.0)) throw invalid_argument_error("radii must lie in (0, 1)");
          if (i && !(rc.radii[i] > rc.radii[i - 1])) throw invalid_argument_error("radii must be strictly increasing");
        }
        rc.convergence.window = detail::get_or<std::size_t>(cfg, "window", rc.convergence.window);
        rc.convergence.limsup_tolerance = detail::get_or(cfg, "limsup_tolerance", rc.convergence.limsup_tolerance);
        rc.convergence.vanishing_fraction = detail::get_or(cfg, "vanishing_fraction", rc.convergence.vanishing_fraction);
        break;
      }
      case Command::taylor_error:
        detail::require(cfg, "degrees", rc.command_name);
        rc.degrees = cfg.at("degrees").get<std::vector<unsigned>>();
        if (rc.norm->kind != NormKind::angular_exact && rc.norm->kind != NormKind::product_exact)
          throw invalid_spec_error("taylor-error needs norm kind angular_exact or product_exact");
        break;
      case Command::density:
        detail::require(cfg, "degrees", rc.command_name);
        rc.degrees = cfg.at("degrees").get<std::vector<unsigned>>();
        rc.r = detail::get_or(cfg, "r", rc.r);
        if (!(rc.r > 0.0 && rc.r < 1.0)) throw invalid_argument_error("r must lie in (0, 1)");
        break;
      case Command::check_condition:
      case Command::find_k: {
        rc.k = detail::get_or<unsigned>(cfg, "k", 0);
        rc.k_max = detail::get_or<unsigned>(cfg, "k_max", rc.k_max);
        if (rc.k_max > 64) throw invalid_argument_error("k_max must be <= 64");
        rc.r0 = detail::get_or(cfg, "r0", rc.r0);
        if (!(rc.r0 > 0.0 && rc.r0 < 1.0)) throw invalid_argument_error("r0 must lie in (0, 1)");
        rc.bound = detail::get_or(cfg, "bound", rc.bound);
        auto& g = rc.condition_grid;
        g.seed = seed;
        if (cfg.contains("grid")) {
          const json& gj = cfg.at("grid");
          g.radii = detail::get_or<std::size_t>(gj, "radii", g.radii);
          g.shells = detail::get_or<std::size_t>(gj, "shells", g.shells);
          g.directions = detail::get_or<std::size_t>(gj, "directions", g.directions);
          g.seed = detail::get_or<std::uint64_t>(gj, "seed", g.seed);
          g.epsilon = detail::get_or(gj, "epsilon", g.epsilon);
          if (gj.contains("domain")) g.domain = detail::parse_domain(gj.at("domain").get<std::string>());
        }
        if (g.radii == 0 || g.shells == 0 || g.directions == 0) throw invalid_argument_error("grid counts must be positive");
        break;
      }
      case Command::check_monotone: {
        rc.k = detail::get_or<unsigned>(cfg, "k", 0);
        auto& g = rc.monotone_grid;
        g.seed = seed;
        if (cfg.contains("grid")) {
          const json& gj = cfg.at("grid");
          g.shells = detail::get_or<std::size_t>(gj, "shells", g.shells);
          g.directions = detail::get_or<std::size_t>(gj, "directions", g.directions);
          g.radii = detail::get_or<std::size_t>(gj, "radii", g.radii);
          g.seed = detail::get_or<std::uint64_t>(gj, "seed", g.seed);
          g.r_min = detail::get_or(gj, "r_min", g.r_min);
          g.step = detail::get_or(gj, "step", g.step);
          g.tolerance = detail::get_or(gj, "tolerance", g.tolerance);
        }
        if (g.shells == 0 || g.directions == 0 || g.radii == 0) throw invalid_argument_error("grid counts must be positive");
        break;
      }
      case Command::norm: break;
    }
    return rc;
  } catch (const json::exception& e) {
    throw invalid_argument_error(std::string("config: ") + e.what());
  }
}

inline void emit_plot(const ConvergenceReport& r, const fs::path& path) { report::write_atomic(path, report::plot(r)); }
inline void emit_plot(const DensityReport& r, const fs::path& path) { report::write_atomic(path, report::plot(r)); }

struct Artifacts {
  report::json report;
  std::optional<std::string> csv;
  std::optional<std::string> svg;
  std::string summary;
};

// Runs a validated config. Numerical failures propagate as numerical_error.
inline Artifacts execute(const RunConfig& rc, const RunOptions& opt) {
  const Parallelism par{opt.workers};
  Artifacts a;
  report::json& rep = a.report;
  rep["command"] = rc.command_name;
  rep["dimension"] = rc.dimension;
  if (rc.weight) rep["weight"] = rc.weight->describe();
  if (rc.norm) {
    rep["norm"] = rc.norm->describe();
    rep["quadrature"] = report::to_json(rc.norm->quadrature);
  }
  std::ostringstream summary;
  summary.precision(17);

  switch (rc.command) {
    case Command::norm: {
      const NormResult r = norm(*rc.series, *rc.norm, par);
      rep["result"] = report::to_json(r);
      report::Csv csv({"piece", "contribution"});
      for (const auto& [label, v] : r.pieces) csv.row({label, report::number(v)});
      a.csv = csv.str();
      summary << "norm: value=" << r.value << " error_estimate=" << r.error_estimate;
      break;
    }
    case Command::check_condition: {
      const ConditionReport r = check_condition(*rc.weight, rc.k, rc.r0, rc.condition_grid, rc.bound, par);
      rep["result"] = report::to_json(r);
      summary << "check-condition: " << (r.passed ? "passed" : "failed") << " k=" << r.k << " C_estimate=" << r.C_estimate;
      break;
    }
    case Command::find_k: {
      const MinKResult r = find_min_k(*rc.weight, rc.k_max, rc.r0, rc.condition_grid, rc.bound, par);
      rep["result"] = report::to_json(r);
      report::Csv csv({"k", "sup_ratio", "tail_C", "passed"});
      for (const auto& c : r.reports)
        csv.row({std::to_string(c.k), report::number(c.sup_ratio), report::number(c.tail_C), c.passed ? "true" : "false"});
      a.csv = csv.str();
      summary << "find-k: k_min=" << (r.k_min ? std::to_string(*r.k_min) : std::string("none"));
      break;
    }
    case Command::check_monotone: {
      const MonotoneReport r = check_monotone(*rc.weight, rc.k, rc.monotone_grid, par);
      rep["result"] = report::to_json(r);
      report::Csv csv({"sample", "abs_z", "monotone", "worst_slope", "worst_r"});
      for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& s = r.samples[i];
        csv.row({std::to_string(i), report::number(s.abs_z), s.monotone ? "true" : "false", report::number(s.worst_slope),
                 report::number(s.worst_r)});
      }
      a.csv = csv.str();
      summary << "check-monotone: k=" << r.k << " monotone_fraction=" << r.monotone_fraction
              << " worst_slope=" << r.worst_slope;
      break;
    }
    case Command::dilate_converge: {
      const ConvergenceReport r = dilation_convergence(*rc.series, *rc.norm, rc.radii, rc.convergence, par);
      rep["result"] = report::to_json(r);
      a.csv = report::convergence_csv(r);
      if (opt.plot) a.svg = report::plot(r);
      summary << "dilate-converge: limsup_check=" << r.limsup_check << " vanishing_check=" << r.vanishing_check;
      break;
    }
    case Command::taylor_error: {
      report::json rows = report::json::array();
      report::Csv csv({"k", "error"});
      bool monotone = true;
      double prev = std::numeric_limits<double>::infinity();
      for (unsigned k : rc.degrees) {
        const double e = taylor_error(*rc.series, k, *rc.norm, par);
        rows.push_back({{"k", k}, {"error", e}});
        csv.row({std::to_string(k), report::number(e)});
        if (e > prev) monotone = false;
        prev = e;
      }
      rep["result"] = {{"rows", std::move(rows)}, {"nonincreasing", monotone}};
      a.csv = csv.str();
      summary << "taylor-error: " << rc.degrees.size() << " rows, nonincreasing=" << monotone;
      break;
    }
    case Command::density: {
      const DensityReport r = density_experiment(*rc.series, *rc.norm, rc.r, rc.degrees, par);
      rep["result"] = report::to_json(r);
      a.csv = report::density_csv(r);
      if (opt.plot) a.svg = report::plot(r);
      summary << "density: r=" << r.r << " dilation_error=" << r.dilation_error;
      break;
    }
  }
  if (!opt.reproducible) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    rep["generated_at"] = buf;
    rep["workers"] = opt.workers;
  }
  a.summary = summary.str();
  return a;
}

// Full driver: parse, validate, compute, write outputs. Returns the exit status
// (0 ok, 2 validation error, 3 numerical or domain error). Outputs are written
// only after every computation has succeeded.
inline int run(const std::string& config_text, const fs::path& base_dir, const fs::path& out_dir, const RunOptions& opt,
               std::ostream& err = std::cerr) {
  RunConfig rc;
  try {
    json cfg;
    try {
      cfg = json::parse(config_text);
    } catch (const json::parse_error& e) {
      throw invalid_argument_error(std::string("config is not valid JSON: ") + e.what());
    }
    rc = parse_config(cfg, base_dir);
  } catch (const invalid_argument_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::validation);
  }

  Artifacts a;
  try {
    a = execute(rc, opt);
  } catch (const invalid_argument_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::validation);
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }

  try {
    fs::create_directories(out_dir);
    report::write_atomic(out_dir / "report.json", a.report.dump(2) + "\n");
    if (a.csv) report::write_atomic(out_dir / "rows.csv", *a.csv);
    if (a.svg) report::write_atomic(out_dir / "plot.svg", *a.svg);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }
  err << a.summary << '\n';
  return static_cast<int>(ExitCode::ok);
}

}  // namespace bergman::cli
