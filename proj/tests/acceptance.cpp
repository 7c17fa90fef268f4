// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "bergman/cli.hpp"
#include "bergman/spaces.hpp"
#include "bergman/verify.hpp"
#include "oracles.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

const Parallelism kPar{std::max(1u, std::thread::hardware_concurrency())};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "  fail: " << what << '\n';
    }
  }
};

std::vector<MultiIndex> indices_up_to(std::size_t n, unsigned d) {
  std::vector<MultiIndex> out;
  for (unsigned k = 0; k <= d; ++k)
    for (auto& m : indices_of_degree(n, k)) out.push_back(std::move(m));
  return out;
}

Outcome quadrature_vs_closed_form() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t n : {1, 2}) {
    for (double alpha : {0.0, 1.0, 2.5}) {
      NormSpec s{n, NormKind::bergman_polydisk, Weight::unit(n)};
      s.alpha = alpha;
      s.quadrature = {64, 8, 64, 0};
      s.estimate_error = false;
      for (const auto& m : indices_up_to(n, 8)) {
        std::vector<unsigned> e(m.entries().begin(), m.entries().end());
        const double expect = oracle::monomial_norm2(e, alpha);
        double closed = 1.0;
        for (unsigned mk : e) closed *= 2 * pi * oracle::beta_closed_form(mk, alpha);
        o.require(oracle::relative(closed, expect) <= 1e-12, "closed form vs oracle at " + m.to_string());
        const double got = bergman_norm(PowerSeries::monomial(m), s, kPar).value_pow_p;
        const double rel = oracle::relative(got, closed);
        worst = std::max(worst, rel);
        if (rel > 1e-8) o.require(false, "n=" + std::to_string(n) + " alpha=" + report::number(alpha) + " m=" + m.to_string());
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(seconds < 30.0, "runtime " + report::number(seconds) + " s");
  o.detail << "  worst relative error " << worst << ", runtime " << seconds << " s\n";
  return o;
}

// Full Hermitian form sum_{m,m'} a_m conj(a_m') prod_k what_k(m_k - m'_k) / (m_k + m'_k + 2) for a
// product angular weight w(theta) = prod_k v(theta_k), with the same periodic grid as the quadrature.
double gram_form(const PowerSeries& f, const std::function<double(double)>& v, std::size_t angular_nodes) {
  const Rule1D grid = periodic_rule(angular_nodes);
  auto what = [&](int d) {
    complex s{};
    for (std::size_t j = 0; j < grid.size(); ++j) s += grid.weights[j] * v(grid.nodes[j]) * std::polar(1.0, d * grid.nodes[j]);
    return s;
  };
  std::map<int, complex> cache;
  auto cached = [&](int d) {
    auto it = cache.find(d);
    if (it == cache.end()) it = cache.emplace(d, what(d)).first;
    return it->second;
  };
  complex total{};
  for (const auto& [m, a] : f.coefficients())
    for (const auto& [mp, b] : f.coefficients()) {
      complex t = a * std::conj(b);
      for (std::size_t k = 0; k < m.size(); ++k)
        t *= cached(static_cast<int>(m[k]) - static_cast<int>(mp[k])) / static_cast<double>(m[k] + mp[k] + 2);
      total += t;
    }
  return total.real();
}

Outcome angular_oracle_equivalence() {
  Outcome o;
  const Weight w = Weight::angular(2, "(4*pi^2 - th1^2)*(4*pi^2 - th2^2)");
  NormSpec quad{2, NormKind::bergman_polydisk, w};
  quad.quadrature = {12, 64, 64, 0};
  quad.estimate_error = false;
  NormSpec exact{2, NormKind::angular_exact, w};
  exact.quadrature = quad.quadrature;
  auto v = [](double t) { return 4 * pi * pi - t * t; };

  double worst = 0.0, worst_gram = 0.0;
  std::size_t agree = 0;
  bool taylor_ok = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PowerSeries f = fixture::random_polynomial(2, 10, 1 + seed % 8, 1000 + seed);
    const double q = bergman_norm(f, quad, kPar).value;
    const double e = angular_exact_norm(f, w, 0.0, exact.quadrature, kPar).value;
    const double rel = oracle::relative(e, q);
    worst = std::max(worst, rel);
    if (rel <= 1e-6) ++agree;
    worst_gram = std::max(worst_gram, oracle::relative(std::sqrt(gram_form(f, v, quad.quadrature.angular_nodes)), q));

    double prev = std::numeric_limits<double>::infinity();
    const unsigned deg = f.effective_degree();
    for (unsigned k = 0; k <= deg; ++k) {
      const double t = taylor_error(f, k, exact, kPar);
      if (t > prev) taylor_ok = false;
      prev = t;
    }
    if (prev != 0.0) taylor_ok = false;
  }
  o.require(agree == 50, "exact vs quadrature agree to 1e-6 on " + std::to_string(agree) + "/50 polynomials");
  o.require(taylor_ok, "taylor_error monotone and exactly 0 at k = degree");
  o.detail << "  worst relative gap exact vs quadrature " << worst << "\n"
           << "  diagnostic: full Hermitian form with cross terms vs quadrature, worst relative gap " << worst_gram
           << "\n"
           << "  the diagonal formula omits a_m conj(a_m') w^(m-m') terms, nonzero for non-constant angular weights\n";
  return o;
}

Outcome condition_suite() {
  Outcome o;
  for (double beta : {0.5, 1.0, 2.0}) {
    const ConditionReport r = check_condition(Weight::gaussian(1, beta), 0, 0.5, {}, 1e6, kPar);
    o.require(r.passed && r.C_estimate <= 1 + 1e-9, "gaussian beta=" + report::number(beta));
    o.detail << "  gaussian(beta=" << beta << ") k=0 C=" << r.C_estimate << '\n';
  }
  for (double alpha : {0.0, 1.0, 2.0}) {
    const auto k = static_cast<unsigned>(std::ceil(2 * alpha + 1));
    const ConditionReport r = check_condition(Weight::standard_alpha(1, alpha), k, 0.5, {}, 1e6, kPar);
    o.require(r.passed && r.C_estimate <= 1 + 1e-9, "standard_alpha alpha=" + report::number(alpha));
    o.detail << "  standard_alpha(alpha=" << alpha << ") k=" << k << " C=" << r.C_estimate << '\n';
  }
  for (const char* src : {"1", "4*pi^2 - th1^2", "2 + sin(3*th1)", "exp(cos(th1))"}) {
    const ConditionReport r = check_condition(Weight::angular(1, src), 0, 0.5, {}, 1e6, kPar);
    o.require(r.passed && std::abs(r.C_estimate - 1.0) <= 1e-12, std::string("angular ") + src);
    o.detail << "  angular " << src << " k=0 C-1=" << r.C_estimate - 1.0 << '\n';
  }
  ConditionGrid ball;
  ball.domain = Domain::ball;
  const ConditionReport r2 = check_condition(Weight::angular(2, "(4*pi^2 - th1^2)*(1 + th2)"), 0, 0.5, ball, 1e6, kPar);
  o.require(r2.passed && std::abs(r2.C_estimate - 1.0) <= 1e-12, "angular n=2 on the ball");
  return o;
}

Outcome monotone_suite() {
  Outcome o;
  const Weight w = Weight::exp_modulus(1);
  const MonotoneReport k0 = check_monotone(w, 0, {}, kPar);
  const MonotoneReport k1 = check_monotone(w, 1, {}, kPar);
  MonotoneGrid half;
  half.r_min = 0.5;
  const MonotoneReport k2 = check_monotone(w, 2, half, kPar);
  o.require(!k0.all_monotone && k0.worst_slope < -1e-6, "k=0 should violate monotonicity");
  o.require(k1.all_monotone, "k=1 should be monotone on (|z|, 1)");
  o.require(k2.all_monotone, "k=2 should be monotone for r > 1/2");
  o.detail << "  k=0 worst slope " << k0.worst_slope << ", k=1 worst slope " << k1.worst_slope << ", k=2 (r>0.5) worst slope "
           << k2.worst_slope << '\n';
  return o;
}

Outcome dilation_suite() {
  Outcome o;
  const PowerSeries f = fixture::harmonic_series(400);
  const std::vector<double> radii{0.9, 0.99, 0.999, 0.9999};
  const QuadratureSpec q{512, 1024, 64, 0};

  auto check_rows = [&](const ConvergenceReport& r, const std::string& label) {
    bool decreasing = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i) decreasing = decreasing && r.rows[i].norm_diff < r.rows[i - 1].norm_diff;
    o.require(decreasing, label + ": rows strictly decreasing");
    o.require(r.rows.back().norm_diff <= 0.05 * r.norm_f, label + ": final row <= 0.05 ||f||");
    o.detail << "  " << label << ": ||f|| = " << r.norm_f;
    for (const auto& row : r.rows) o.detail << ", " << row.r << " -> " << row.norm_diff;
    o.detail << '\n';
  };
  auto check_oracle = [&](const ConvergenceReport& r, const std::vector<double>& c, const std::string& label) {
    double worst = 0.0;
    for (const auto& row : r.rows) {
      double s = 0.0;
      for (unsigned k = 0; k <= 400; ++k) {
        const double d = (1.0 - std::pow(row.r, k)) / (k + 1.0);
        s += d * d * c[k];
      }
      worst = std::max(worst, oracle::relative(row.norm_diff * row.norm_diff, s));
    }
    o.require(worst <= 1e-8, label + ": coefficient oracle");
    o.detail << "  " << label << ": worst relative gap to coefficient oracle " << worst << '\n';
  };

  NormSpec a{1, NormKind::bergman_polydisk, Weight::gaussian(1, 1.0)};
  a.quadrature = q;
  a.estimate_error = false;
  const ConvergenceReport ra = dilation_convergence(f, a, radii, {}, kPar);
  check_rows(ra, "(a) gaussian bergman");
  std::vector<double> ca(401), cc(401);
  for (unsigned k = 0; k <= 400; ++k) {
    ca[k] = oracle::gaussian_moment(k, 1.0);
    cc[k] = static_cast<double>(k) * k * pi / (k + 1.0);
  }
  check_oracle(ra, ca, "(a) gaussian bergman");

  NormSpec b{1, NormKind::angular_exact, Weight::angular(1, "4*pi^2 - th1^2")};
  check_rows(dilation_convergence(f, b, radii, {}, kPar), "(b) angular exact");

  NormSpec c{1, NormKind::radial_besov_polydisk, Weight::unit(1)};
  c.quadrature = q;
  c.estimate_error = false;
  const ConvergenceReport rc = dilation_convergence(f, c, radii, {}, kPar);
  check_rows(rc, "(c) radial besov");
  check_oracle(rc, cc, "(c) radial besov");
  return o;
}

Outcome besov_suite() {
  Outcome o;
  struct Case {
    std::size_t n;
    unsigned N;
    double p;
    PowerSeries f;
  };
  std::vector<Case> cases{
      {1, 2, 2.0, PowerSeries::from_terms(1, {{MultiIndex{0}, 2.0}, {MultiIndex{1}, complex(0, 3)}})},
      {2, 3, 3.0, fixture::random_polynomial(2, 2, 4, 77)},
      {3, 2, 2.0, fixture::random_polynomial(3, 1, 3, 78)},
      {2, 1, 4.0, PowerSeries::constant(2, complex(-1, 1))}};
  for (const auto& cs : cases) {
    NormSpec s{cs.n, NormKind::besov_ball, Weight::unit(cs.n)};
    s.p = cs.p;
    s.N = cs.N;
    s.quadrature = {16, 16, 256, 0};
    double expect = 0.0;
    for (const auto& [m, a] : cs.f.coefficients()) {
      double fact = 1.0;
      for (std::size_t k = 0; k < m.size(); ++k)
        for (unsigned j = 2; j <= m[k]; ++j) fact *= j;
      expect += std::pow(std::abs(a) * fact, cs.p);
    }
    expect = std::pow(expect, 1.0 / cs.p);
    const double got = besov_ball_norm(cs.f, s, kPar).value;
    o.require(oracle::relative(got, expect) <= 4e-16, "degree < N case n=" + std::to_string(cs.n));
  }

  NormSpec s{1, NormKind::besov_ball, Weight::unit(1)};
  s.p = 4.0;
  s.N = 1;
  const PowerSeries z2 = PowerSeries::monomial({2});
  const double expect =
      oracle::integrate([](double rho) { return 16 * std::pow(rho, 4) * std::pow(1 - rho * rho, 2) * 2 * rho; }, 0, 1);
  const NormResult r = besov_ball_norm(z2, s, kPar);
  o.require(oracle::relative(r.value_pow_p, expect) <= 1e-8, "z^2 quartic oracle");
  o.detail << "  z^2, N=1, p=4: value^4 = " << r.value_pow_p << ", oracle " << expect << '\n';

  s.estimate_error = false;
  const auto sweep = besov_rho_sweep(z2, s, 4, kPar);
  const double gap = std::abs(sweep[3].second.value - sweep[2].second.value);
  o.require(gap <= 1e-8, "rho_max sweep last two levels");
  o.detail << "  rho_max sweep last-two gap " << gap << '\n';
  return o;
}

Outcome radial_derivative_suite() {
  Outcome o;
  for (std::size_t n = 1; n <= 3; ++n)
    for (const auto& m : indices_up_to(n, 12)) {
      const PowerSeries f = PowerSeries::monomial(m);
      o.require(radial_derivative(f) == complex(static_cast<double>(m.degree())) * f, "R z^" + m.to_string());
    }
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PowerSeries f = fixture::random_polynomial(n, 12, 10, 500 + seed);
      for (double r : {0.1, 0.5, 0.9, 0.999}) {
        const PowerSeries a = radial_derivative(dilate(f, r));
        const PowerSeries b = dilate(radial_derivative(f), r);
        for (const auto& [m, c] : a.coefficients()) worst = std::max(worst, std::abs(c - b.coefficient(m)) / std::abs(c));
        o.require(a.coefficients().size() == b.coefficients().size(), "support of R f_r");
      }
    }
  o.require(worst <= 1e-15, "R commutes with dilation");
  o.detail << "  worst coefficient gap R(f_r) vs (Rf)_r " << worst << '\n';
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism_suite() {
  Outcome o;
  const fs::path configs = BERGMAN_CONFIG_DIR;
  const fs::path root = fs::temp_directory_path() / "bergman_acceptance";
  fs::remove_all(root);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs)) {
    const std::string name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.rfind("series_", 0) != 0 && name.rfind("invalid_", 0) != 0)
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::set<std::string> commands;
  for (const auto& cfg : files) {
    const std::string text = slurp(cfg);
    commands.insert(nlohmann::json::parse(text)["command"].get<std::string>());
    std::vector<fs::path> outs;
    for (unsigned workers : {1u, 8u, 1u, 8u}) {
      cli::RunOptions opt;
      opt.workers = workers;
      opt.reproducible = true;
      const fs::path out = root / cfg.stem() / std::to_string(outs.size());
      std::ostringstream err;
      const int rc = cli::run(text, configs, out, opt, err);
      o.require(rc == 0, cfg.filename().string() + " exit " + std::to_string(rc) + " " + err.str());
      outs.push_back(out);
    }
    for (const char* file : {"report.json", "rows.csv", "plot.svg"}) {
      const bool present = fs::exists(outs[0] / file);
      for (const auto& out : outs) {
        o.require(fs::exists(out / file) == present, cfg.filename().string() + ": " + file + " presence");
        if (present) o.require(slurp(out / file) == slurp(outs[0] / file), cfg.filename().string() + ": " + file + " differs");
      }
    }
  }
  o.require(commands.size() == 7, "fixtures cover all 7 commands (" + std::to_string(commands.size()) + ")");
  o.detail << "  " << files.size() << " configs, " << commands.size() << " commands, workers {1, 8} x 2 runs\n";
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "quadrature matches Beta-product closed form for monomials", quadrature_vs_closed_form},
      {2, "angular exact norm vs quadrature on 50 random polynomials; Taylor errors", angular_oracle_equivalence},
      {3, "dilation condition certification suite", condition_suite},
      {4, "monotonicity suite for exp(|z|)", monotone_suite},
      {5, "dilation convergence for the degree-400 series", dilation_suite},
      {6, "Besov-ball normalization and rho_max sweep", besov_suite},
      {7, "radial derivative algebra", radial_derivative_suite},
      {8, "byte-identical reproducible reports at 1 and 8 workers", determinism_suite},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "  exception: " << e.what() << '\n';
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << '\n' << o.detail.str()
              << "  time " << seconds << " s\n";
    std::cout.flush();
    if (!o.pass) ++failures;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " of 8 criteria failing\n";
  return failures ? 1 : 0;
}
