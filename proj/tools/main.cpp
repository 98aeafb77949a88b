// Command-line front end: exact stationary solves, Gillespie runs, coupled
// simulations, phase scans, finite-N and limiting Laplace transforms,
// convergence ladders, continuous dual Hahn tables, and the invariant suite.
//
// Exit codes: 0 pass, 1 invariant failure, 2 config error, 3 numeric failure.
// Identical configuration and seed produce byte-identical output files; wall
// time is reported on stderr only.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "openkpz/openkpz.hpp"

using json = nlohmann::ordered_json;
using namespace openkpz;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int worker_cap() {
  if (const char* env = std::getenv("KPZ_STATIONARY_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 4u));
}

// run tasks 0..n-1 on up to worker_cap() threads; results keyed by index
template <typename F>
void parallel_for(int n, F&& f) {
  int workers = std::min(worker_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  for (auto& t : pool) t.join();
}

struct OutputSink {
  std::string path;    // empty = stdout
  std::string format;  // csv | json

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path " + path);
    out << text;
  }
};

json spec_echo(const measure::QuadratureSpec& spec) {
  return {{"panels", spec.panels},
          {"nodes_per_panel", spec.nodes_per_panel},
          {"cutoff", spec.cutoff},
          {"rel_tol", spec.rel_tol}};
}

json base_record(const std::string& command) {
  return {{"command", command}, {"library_version", OPENKPZ_VERSION}, {"rng", SplitMix64::name()}};
}

std::string csv_of_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

void emit(const OutputSink& sink, const json& record, const std::vector<std::string>& header,
          const std::vector<std::vector<std::string>>& rows) {
  if (sink.format == "json") {
    json out = record;
    json table = json::array();
    for (const auto& row : rows) {
      json jrow;
      for (std::size_t i = 0; i < header.size(); ++i) jrow[header[i]] = row[i];
      table.push_back(jrow);
    }
    out["table"] = table;
    sink.write(out.dump(2) + "\n");
  } else {
    sink.write(csv_of_table(header, rows));
  }
}

measure::QuadratureSpec spec_from_tol(double tol) {
  measure::QuadratureSpec spec;
  spec.rel_tol = tol;
  spec.panels = 40;
  spec.nodes_per_panel = 24;
  spec.cutoff = 700.0;
  return spec;
}

// ---- subcommand bodies ----------------------------------------------------

int cmd_stationary(double u, double v, int N, std::vector<double> X, std::vector<double> c,
                   const OutputSink& sink) {
  auto model = asep::model_from_uv(N, {u, v});
  auto dist = asep::stationary_exact(model);
  json rec = base_record("stationary");
  rec["inputs"] = {{"u", u}, {"v", v}, {"n_sites", N}};
  rec["outputs"] = {{"q", model.q},         {"alpha", model.alpha}, {"beta", model.beta},
                    {"gamma", model.gamma}, {"delta", model.delta}, {"rho_left", model.rho_left},
                    {"rho_right", model.rho_right}, {"current", asep::current_exact(dist)}};
  rec["residuals"] = {{"stationarity", dist.residual}, {"tolerance", 1e-10}};
  if (!X.empty()) {
    LaplaceQuery query{X, c};
    rec["outputs"]["laplace"] = {{"X", X}, {"c", c}, {"value", asep::laplace_exact(dist, query)}};
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < dist.probs.size(); ++s)
    rows.push_back({std::to_string(s), fmt17(dist.probs[s])});
  emit(sink, rec, {"state", "probability"}, rows);
  return 0;
}

int cmd_simulate(double u, double v, int N, double t_max, std::uint64_t seed, double burn_in,
                 std::uint64_t max_events, const OutputSink& sink) {
  auto model = asep::model_from_uv(N, {u, v});
  auto out = asep::simulate(model, t_max, seed, asep::Configuration(N, 0), burn_in, max_events);
  json rec = base_record("simulate");
  rec["inputs"] = {{"u", u},       {"v", v},           {"n_sites", N},
                   {"t_max", t_max}, {"burn_in", burn_in}, {"max_events", max_events}};
  rec["seed"] = seed;
  rec["outputs"] = {{"events", out.events}, {"t_final", out.t_final},
                    {"avg_current", out.avg_current}};
  std::vector<std::vector<std::string>> rows;
  for (int x = 0; x < N; ++x)
    rows.push_back({std::to_string(x + 1), fmt17(out.avg_occupation[x]),
                    std::to_string(static_cast<int>(out.final_config[x]))});
  emit(sink, rec, {"site", "avg_occupation", "final"}, rows);
  return 0;
}

int cmd_coupled(double u, double v, int N, double t_max, std::uint64_t seed,
                std::uint64_t max_events, const OutputSink& sink) {
  std::vector<asep::AsepModel> models = {asep::model_from_uv(N, {-v, v}),
                                         asep::model_from_uv(N, {u, v}),
                                         asep::model_from_uv(N, {u, -u})};
  std::vector<asep::Configuration> init(3, asep::Configuration(N, 0));
  auto out = asep::simulate_coupled(models, t_max, seed, init, 0.0, max_events);
  json rec = base_record("coupled");
  rec["inputs"] = {{"u", u}, {"v", v}, {"n_sites", N}, {"t_max", t_max}, {"max_events", max_events}};
  rec["seed"] = seed;
  rec["outputs"] = {{"events", out.events}, {"t_final", out.t_final},
                    {"ordering_ok", out.ordering_ok}};
  std::vector<std::vector<std::string>> rows;
  for (int x = 0; x < N; ++x)
    rows.push_back({std::to_string(x + 1), fmt17(out.avg_occupation[0][x]),
                    fmt17(out.avg_occupation[1][x]), fmt17(out.avg_occupation[2][x])});
  emit(sink, rec, {"site", "occ_low", "occ_mid", "occ_high"}, rows);
  return 0;
}

int cmd_phase_scan(std::vector<double> rho_l, std::vector<double> rho_r, int N, double t_max,
                   std::uint64_t seed, std::uint64_t max_events, bool with_sim,
                   const OutputSink& sink) {
  struct Row {
    double rl, rr, J;
    std::string phase;
    double J_sim = 0.0, se = 0.0;
  };
  std::vector<Row> grid;
  for (double rl : rho_l)
    for (double rr : rho_r) {
      Row row{rl, rr, 0.0, "", 0.0, 0.0};
      try {
        auto p = asep::phase_point(rl, rr);
        row.J = p.J;
        row.phase = p.phase == asep::Phase::MaximalCurrent ? "MaximalCurrent"
                    : p.phase == asep::Phase::LowDensity   ? "LowDensity"
                                                           : "HighDensity";
      } catch (const std::domain_error&) {
        // adjacent-phase currents coincide on the boundary lines
        row.phase = "Boundary";
        row.J = std::min({0.25, rl * (1.0 - rl), rr * (1.0 - rr)});
      }
      grid.push_back(row);
    }
  if (with_sim) {
    parallel_for(static_cast<int>(grid.size()), [&](int i) {
      auto& row = grid[i];
      // q = 0 chart: alpha = rho_l, beta = 1 - rho_r
      auto model = asep::model_from_rates(N, 0.0, row.rl, 1.0 - row.rr, 0.0, 0.0);
      std::vector<double> vals;
      for (std::uint64_t s = 0; s < 3; ++s) {
        auto run = asep::simulate(model, t_max, seed + 1000 * i + s, asep::Configuration(N, 0),
                                  0.0, max_events ? max_events : 200000);
        auto tail = asep::simulate(model, run.t_final, seed + 1000 * i + s,
                                   asep::Configuration(N, 0), 0.2 * run.t_final);
        vals.push_back(tail.avg_current);
      }
      double mean = (vals[0] + vals[1] + vals[2]) / 3.0;
      double var = 0.0;
      for (double x : vals) var += (x - mean) * (x - mean);
      row.J_sim = mean;
      row.se = std::sqrt(var / 2.0 / 3.0);
    });
  }
  json rec = base_record("phase-scan");
  rec["inputs"] = {{"rho_l", rho_l}, {"rho_r", rho_r}, {"n_sites", N},
                   {"max_events", max_events}, {"simulate", with_sim}};
  rec["seed"] = seed;
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : grid) {
    std::vector<std::string> r{fmt17(row.rl), fmt17(row.rr), row.phase, fmt17(row.J)};
    if (with_sim) {
      r.push_back(fmt17(row.J_sim));
      r.push_back(fmt17(row.se));
    }
    rows.push_back(r);
  }
  std::vector<std::string> header{"rho_l", "rho_r", "phase", "J_predicted"};
  if (with_sim) {
    header.push_back("J_simulated");
    header.push_back("stderr");
  }
  emit(sink, rec, header, rows);
  return 0;
}

int cmd_phi_n(double u, double v, int N, std::vector<double> X, std::vector<double> c, double tol,
              const OutputSink& sink) {
  auto spec = spec_from_tol(tol);
  LaplaceQuery query{X, c};
  double value = askey_wilson::phi_n({u, v}, N, query, spec);
  json rec = base_record("phi-n");
  rec["inputs"] = {{"u", u}, {"v", v}, {"n_sites", N}, {"X", X}, {"c", c}};
  rec["quadrature"] = spec_echo(spec);
  rec["outputs"] = {{"phi_n", value}, {"tolerance", tol}};
  emit(sink, rec, {"N", "phi_n"}, {{std::to_string(N), fmt17(value)}});
  return 0;
}

int cmd_phi_limit(double u, double v, std::vector<double> X, std::vector<double> c, double tol,
                  const OutputSink& sink) {
  auto spec = spec_from_tol(tol);
  LaplaceQuery query{X, c};
  double value = kpz::phi_limit({u, v}, query, spec);
  json rec = base_record("phi-limit");
  rec["inputs"] = {{"u", u}, {"v", v}, {"X", X}, {"c", c}};
  rec["quadrature"] = spec_echo(spec);
  rec["outputs"] = {{"phi_limit", value}, {"tolerance", tol},
                    {"range", kpz::range_tag_name(kpz::range_tag({u, v}, query))}};
  emit(sink, rec, {"phi_limit"}, {{fmt17(value)}});
  return 0;
}

int cmd_convergence(double u, double v, std::vector<double> X, std::vector<double> c,
                    std::vector<int> ladder, double tol, const OutputSink& sink) {
  cdh::CdhProcessParams pp{u, v};
  LaplaceQuery query{X, c};
  query.validate();
  if (!(u + v > 0.0)) throw std::invalid_argument("convergence: need u + v > 0");
  if (!(query.s()[0] < pp.c_uv()))
    throw std::invalid_argument("convergence: range condition c_1 + ... + c_d < C_uv violated");
  auto spec = spec_from_tol(tol);
  double lim = kpz::phi_limit(pp, query, spec);
  std::vector<double> values(ladder.size());
  parallel_for(static_cast<int>(ladder.size()), [&](int i) {
    values[i] = askey_wilson::phi_n({u, v}, ladder[i], query, spec);
  });
  json rec = base_record("convergence");
  rec["inputs"] = {{"u", u}, {"v", v}, {"X", X}, {"c", c}, {"ladder", ladder}};
  rec["quadrature"] = spec_echo(spec);
  rec["outputs"] = {{"phi_limit", lim}, {"tolerance", tol},
                    {"range", kpz::range_tag_name(kpz::range_tag(pp, query))}};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < ladder.size(); ++i)
    rows.push_back({std::to_string(ladder[i]), fmt17(values[i]), fmt17(lim),
                    fmt17(std::abs(values[i] - lim))});
  emit(sink, rec, {"N", "phi_N", "phi_limit", "abs_diff"}, rows);
  return 0;
}

int cmd_cdh_table(double u, double v, double s, std::vector<double> r_grid, const OutputSink& sink) {
  cdh::CdhProcessParams pp{u, v};
  pp.validate();
  json rec = base_record("cdh-table");
  rec["inputs"] = {{"u", u}, {"v", v}, {"s", s}};
  std::vector<std::vector<std::string>> rows;
  for (double r : r_grid)
    rows.push_back({"density", fmt17(r), fmt17(cdh::marginal_density(pp, s, r))});
  auto grid = cdh::marginal_atoms(pp, s);
  for (int j = 0; j < grid.count(); ++j)
    rows.push_back({grid.flavor == cdh::AtomFlavor::u_atoms ? "u_atom" : "v_atom",
                    fmt17(grid.locations[j]), fmt17(std::exp(grid.log_masses[j]))});
  emit(sink, rec, {"kind", "location", "value"}, rows);
  return 0;
}

// ---- verify ----------------------------------------------------------------

struct VerifyReport {
  std::vector<std::vector<std::string>> rows;
  bool all_pass = true;

  void add(const std::string& name, double residual, double tol) {
    bool pass = residual <= tol;
    all_pass = all_pass && pass;
    rows.push_back({name, pass ? "pass" : "FAIL", fmt17(residual), fmt17(tol)});
  }
};

int cmd_verify(bool inject_defect, const OutputSink& sink) {
  VerifyReport rep;
  measure::QuadratureSpec spec;
  spec.panels = 48;
  spec.nodes_per_panel = 28;
  spec.cutoff = 800.0;
  spec.rel_tol = 1e-10;

  // theta functional identities
  {
    double worst = 0.0;
    for (double kappa : {0.25, 0.5, 1.0})
      for (cplx z : {cplx(0.3), cplx(0.7, 0.4), cplx(1.2, -0.1)}) {
        double q = std::exp(-kappa);
        cplx lhs = std::exp(specfun::log_qpoch_inf(std::exp(-kappa * z), q));
        cplx common = std::sqrt(2.0 * pi / kappa) *
                      std::exp(kappa / 8.0 - kappa * z / 2.0 + kappa * z * z / 2.0) /
                      std::exp(specfun::log_qpoch_inf(cplx(q), q));
        cplx rhs = common / std::exp(specfun::log_qpoch_inf(std::exp(-kappa * (1.0 - z)), q)) *
                   specfun::theta1(z, 2.0 * pi / kappa);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
        cplx lhsm = std::exp(specfun::log_qpoch_inf(-std::exp(-kappa * z), q));
        cplx rhsm = common / std::exp(specfun::log_qpoch_inf(-std::exp(-kappa * (1.0 - z)), q)) *
                    specfun::theta4(z, 2.0 * pi / kappa);
        worst = std::max(worst, std::abs(lhsm - rhsm) / (1.0 + std::abs(lhsm)));
      }
    rep.add("theta_identities", worst, 1e-9);
  }
  // q-Pochhammer asymptotic order (0.9 - worst empirical slope <= 0)
  {
    double worst_slope = 10.0;
    for (cplx z : {cplx(1.3), cplx(0.4, 0.7), cplx(-0.2, 0.1)}) {
      std::vector<double> lk, le;
      for (int e = 3; e <= 10; ++e) {
        double kappa = std::pow(2.0, -e);
        auto r = specfun::qpoch_asymptotic(kappa, z, specfun::ExpansionSign::plus, 1);
        lk.push_back(std::log(kappa));
        le.push_back(std::log(r.error_measured));
      }
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < lk.size(); ++i) mx += lk[i], my += le[i];
      mx /= lk.size();
      my /= le.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < lk.size(); ++i)
        sxy += (lk[i] - mx) * (le[i] - my), sxx += (lk[i] - mx) * (lk[i] - mx);
      worst_slope = std::min(worst_slope, sxy / sxx);
    }
    rep.add("qpoch_asymptotic_order", 0.9 - worst_slope, 0.0);
  }
  // normalization of AW / CDH / Wilson fixtures
  {
    double worst = 0.0;
    auto mass_err = [&](const measure::MixedMeasure& mu) {
      return std::abs(measure::total_mass(mu, spec) - 1.0);
    };
    worst = std::max(worst, mass_err(askey_wilson::aw_measure(
                                         {cplx(0.5), cplx(-0.3), cplx(0.4), cplx(-0.2), 0.5})
                                         .to_mixed_measure()));
    worst = std::max(worst, mass_err(askey_wilson::aw_measure(
                                         {cplx(1.4), cplx(-0.3), cplx(0.4), cplx(-0.2), 0.5})
                                         .to_mixed_measure()));
    auto cdh_p = cdh::cdh_measure(cdh::make_cdh_case(0.5, cplx(0.7, 0.3), cplx(0.7, -0.3), {}));
    if (inject_defect) {
      auto base = cdh_p.log_density;
      cdh_p.log_density = [base](double r) { return base(r) + 0.01; };
    }
    worst = std::max(worst, mass_err(cdh_p));
    worst = std::max(worst, mass_err(cdh::cdh_measure(cdh::make_cdh_case(
                                -0.4, cplx(0.9, 0.4), cplx(0.9, -0.4), {-0.64}))));
    worst = std::max(worst, mass_err(cdh::wilson_measure(cdh::make_wilson_case(
                                cplx(0.3), cplx(0.5), cplx(0.6, 0.2), cplx(0.6, -0.2), {}))));
    worst = std::max(worst,
                     mass_err(cdh::wilson_measure(cdh::make_wilson_case(
                         cplx(0.4, 0.7), cplx(0.4, -0.7), cplx(0.6, 0.2), cplx(0.6, -0.2), {}))));
    rep.add("measure_normalization", worst, 1e-6);
  }
  // Chapman-Kolmogorov residuals
  {
    double worst = cdh::check_consistency({1.0, 0.5}, 0.1, 0.4, 0.9, {0.5, 1.5, 4.0}, spec);
    cdh::CdhProcessParams pa{2.0, -0.6};
    std::vector<double> probes{0.5, 2.5};
    for (int j = 0; j < cdh::marginal_atoms(pa, 0.4).count(); ++j)
      probes.push_back(cdh::marginal_atoms(pa, 0.4).locations[j]);
    worst = std::max(worst, cdh::check_consistency(pa, 0.1, 0.4, 0.9, probes, spec));
    rep.add("chapman_kolmogorov", worst, 1e-5);
  }
  // coupled ordering over a long run
  {
    const int N = 30;
    double u = 0.8, v = 0.5;
    std::vector<asep::AsepModel> models = {asep::model_from_uv(N, {-v, v}),
                                           asep::model_from_uv(N, {u, v}),
                                           asep::model_from_uv(N, {u, -u})};
    auto out = asep::simulate_coupled(models, 1e18, 12345,
                                      std::vector<asep::Configuration>(3, asep::Configuration(N, 0)),
                                      0.0, 20000);
    double violations = out.ordering_ok ? 0.0 : 1.0;
    for (int x = 0; x < N; ++x) {
      if (out.final_configs[0][x] > out.final_configs[1][x]) violations += 1.0;
      if (out.final_configs[1][x] > out.final_configs[2][x]) violations += 1.0;
    }
    rep.add("coupling_ordering", violations, 0.0);
  }
  // key identity at desk scale
  {
    asep::BoundaryParams bp{1.0, 0.5};
    LaplaceQuery q{{0.5}, {0.3}};
    double exact = asep::laplace_exact(asep::stationary_exact(asep::model_from_uv(4, bp)), q);
    double aw = askey_wilson::phi_n(bp, 4, q, spec);
    rep.add("key_identity_N4", std::abs(exact - aw), 1e-6);
  }

  json rec = base_record("verify");
  rec["inputs"] = {{"inject_defect", inject_defect}};
  emit(sink, rec, {"check", "status", "residual", "tolerance"}, rep.rows);
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open ASEP / Askey-Wilson / open KPZ stationary-measure toolkit"};
  app.require_subcommand(1);

  double u = 0.0, v = 0.0, t_max = 1e4, tol = 1e-8, s_time = 0.0;
  int n_sites = 8;
  std::uint64_t seed = 1, max_events = 0;
  double burn_in = 0.0;
  std::vector<double> X, c, rho_l{0.2, 0.5, 0.8}, rho_r{0.2, 0.5, 0.8},
      r_grid{0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<int> ladder{16, 64, 256, 1024};
  bool with_sim = false, inject_defect = false;
  OutputSink sink;
  sink.format = "csv";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", sink.path, "output path (default stdout)");
    cmd->add_option("--format", sink.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* st = app.add_subcommand("stationary", "exact stationary distribution, current, Laplace");
  st->add_option("--u", u, "left boundary parameter")->required();
  st->add_option("--v", v, "right boundary parameter")->required();
  st->add_option("--n-sites", n_sites, "system size");
  st->add_option("--x", X, "Laplace locations");
  st->add_option("--c", c, "Laplace variables");
  add_common(st);

  auto* sim = app.add_subcommand("simulate", "event-driven simulation");
  sim->add_option("--u", u)->required();
  sim->add_option("--v", v)->required();
  sim->add_option("--n-sites", n_sites);
  sim->add_option("--t-max", t_max);
  sim->add_option("--seed", seed);
  sim->add_option("--burn-in", burn_in);
  sim->add_option("--max-events", max_events);
  add_common(sim);

  auto* cp = app.add_subcommand("coupled", "three-model attractive coupling");
  cp->add_option("--u", u)->required();
  cp->add_option("--v", v)->required();
  cp->add_option("--n-sites", n_sites);
  cp->add_option("--t-max", t_max);
  cp->add_option("--seed", seed);
  cp->add_option("--max-events", max_events);
  add_common(cp);

  auto* ps = app.add_subcommand("phase-scan", "phase classification grid");
  ps->add_option("--rho-l", rho_l, "left densities");
  ps->add_option("--rho-r", rho_r, "right densities");
  ps->add_option("--n-sites", n_sites);
  ps->add_option("--t-max", t_max);
  ps->add_option("--seed", seed);
  ps->add_option("--max-events", max_events);
  ps->add_flag("--simulate", with_sim, "Monte Carlo current at each grid point");
  add_common(ps);

  auto* pn = app.add_subcommand("phi-n", "finite-N Laplace transform");
  pn->add_option("--u", u)->required();
  pn->add_option("--v", v)->required();
  pn->add_option("--n-sites", n_sites);
  pn->add_option("--x", X)->required();
  pn->add_option("--c", c)->required();
  pn->add_option("--tol", tol);
  add_common(pn);

  auto* pl = app.add_subcommand("phi-limit", "limiting Laplace transform");
  pl->add_option("--u", u)->required();
  pl->add_option("--v", v)->required();
  pl->add_option("--x", X)->required();
  pl->add_option("--c", c)->required();
  pl->add_option("--tol", tol);
  add_common(pl);

  auto* cv = app.add_subcommand("convergence", "phi_N versus phi over an N ladder");
  cv->add_option("--u", u)->required();
  cv->add_option("--v", v)->required();
  cv->add_option("--x", X)->required();
  cv->add_option("--c", c)->required();
  cv->add_option("--ladder", ladder);
  cv->add_option("--tol", tol);
  add_common(cv);

  auto* ct = app.add_subcommand("cdh-table", "continuous dual Hahn density and atoms");
  ct->add_option("--u", u)->required();
  ct->add_option("--v", v)->required();
  ct->add_option("--s", s_time, "process time");
  ct->add_option("--r-grid", r_grid);
  add_common(ct);

  auto* vf = app.add_subcommand("verify", "invariant suite");
  vf->add_flag("--inject-defect", inject_defect, "negative control: perturb a density");
  add_common(vf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (st->parsed()) code = cmd_stationary(u, v, n_sites, X, c, sink);
    else if (sim->parsed()) code = cmd_simulate(u, v, n_sites, t_max, seed, burn_in, max_events, sink);
    else if (cp->parsed()) code = cmd_coupled(u, v, n_sites, t_max, seed, max_events, sink);
    else if (ps->parsed())
      code = cmd_phase_scan(rho_l, rho_r, n_sites, t_max, seed, max_events, with_sim, sink);
    else if (pn->parsed()) code = cmd_phi_n(u, v, n_sites, X, c, tol, sink);
    else if (pl->parsed()) code = cmd_phi_limit(u, v, X, c, tol, sink);
    else if (cv->parsed()) code = cmd_convergence(u, v, X, c, ladder, tol, sink);
    else if (ct->parsed()) code = cmd_cdh_table(u, v, s_time, r_grid, sink);
    else if (vf->parsed()) code = cmd_verify(inject_defect, sink);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "wall_time_s " << dt << "\n";
  return code;
}
