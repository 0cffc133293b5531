#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qwalk/analytic1d.hpp"
#include "qwalk/analytic2d.hpp"
#include "qwalk/attractors.hpp"
#include "qwalk/config.hpp"
#include "qwalk/evolve.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/serialize.hpp"

namespace {

using namespace qwalk;
using io::Json;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitVerification = 4;

// Misuse of the command line that only surfaces after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::string config_path;
  std::optional<int> steps, shots, threads, record_every;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> initial, format, output, engine, site;
};

void emit(const cli::RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw ValidationError("cannot write output file '" + cfg.output + "'");
  f << text;
}

void emit_json(const cli::RunConfig& cfg, const Json& j) { emit(cfg, j.dump(2) + "\n"); }

void require_json(const cli::RunConfig& cfg, const std::string& command) {
  if (cfg.format != "json") {
    throw UsageError("--format csv applies to distributions only; '" + command + "' emits JSON");
  }
}

void require_interior(const WalkModel& model, const std::string& command) {
  if (!model.probs().strictly_interior()) {
    throw ValidationError(command +
                          ": asymptotic results need every p strictly inside (0, 1); "
                          "use 'evolve' to simulate extremal probabilities");
  }
}

Json warnings_json(const WalkModel& model) {
  Json w = Json::array();
  for (const auto& s : model.warnings()) w.push_back(s);
  return w;
}

Json summary_json(const std::vector<Attractor>& attractors) {
  Json out = Json::array();
  for (const auto& [lambda, count] : dimension_summary(attractors)) {
    out.push_back({{"lambda", io::to_json(lambda)}, {"count", count}});
  }
  return out;
}

void print_summary(const std::vector<Attractor>& attractors) {
  std::cerr << "lambda (re, im)            count\n";
  for (const auto& [lambda, count] : dimension_summary(attractors)) {
    char line[96];
    std::snprintf(line, sizeof line, "(%+.6f, %+.6f)  %6d\n", lambda.real(), lambda.imag(), count);
    std::cerr << line;
  }
  std::cerr << "total                       " << attractors.size() << "\n";
}

bool solver_fits(const QuantumWalk& walk) {
  const long long d = walk.dimension();
  return d * d <= kMaxSolverOperatorDim;
}

bool grover_walk(const QuantumWalk& walk) {
  return walk.lattice().is_2d() && walk.uses_grover_coin() && walk.uses_default_reflection();
}

analytic1d::SU2CoinParams su2_params(const cli::RunConfig& cfg) {
  return {cfg.alpha, cfg.beta, cfg.gamma};
}

int run_evolve(const cli::RunConfig& cfg) {
  const WalkModel& model = *cfg.model;
  const auto init = cli::resolve_initial(cfg.initial, model.lattice());
  std::vector<ObservableReport> reports;
  Json j;
  j["command"] = "evolve";
  j["lattice"] = model.lattice().describe();
  j["engine"] = cfg.engine;
  j["steps"] = cfg.steps;
  if (cfg.engine == "exact") {
    reports = run_exact(model, init.density, cfg.steps, cfg.record_every).reports;
  } else {
    if (!init.pure) throw ValidationError("the montecarlo engine needs a pure initial state");
    MonteCarloOptions opts{cfg.shots, cfg.seed, cfg.threads, cfg.record_every};
    reports = run_monte_carlo(model, *init.pure, cfg.steps, opts).reports;
    j["shots"] = cfg.shots;
    j["seed"] = cfg.seed;
  }
  if (cfg.format == "csv") {
    emit(cfg, io::reports_to_csv(reports));
    return 0;
  }
  j["warnings"] = warnings_json(model);
  Json series = Json::array();
  for (const auto& r : reports) series.push_back(io::to_json(r));
  j["reports"] = std::move(series);
  emit_json(cfg, j);
  return 0;
}

int run_attractors(const cli::RunConfig& cfg) {
  require_json(cfg, "attractors");
  require_interior(*cfg.model, "attractors");
  const auto attractors = attractor_space_numeric(*cfg.model);
  Json out = Json::array();
  for (const auto& a : attractors) out.push_back(io::to_json(a));
  emit_json(cfg, out);
  print_summary(attractors);
  return 0;
}

int run_asymptotic(const cli::RunConfig& cfg) {
  const WalkModel& model = *cfg.model;
  require_interior(model, "asymptotic");
  const auto init = cli::resolve_initial(cfg.initial, model.lattice());
  Matrix stationary, at_n;
  Json j;
  j["command"] = "asymptotic";
  j["lattice"] = model.lattice().describe();
  if (solver_fits(model)) {
    const auto dec = asymptotic_decomposition(attractor_space_numeric(model), init.density);
    stationary = dec.stationary_part();
    at_n = dec.evaluate(cfg.steps);
    j["method"] = "attractors";
    j["attractor_count"] = dec.attractors().size();
    j["dimension_summary"] = summary_json(dec.attractors());
  } else if (grover_walk(model)) {
    const auto basis = analytic2d::grover_eigenstates(model).basis;
    stationary = stationary_from_eigenstates(basis, init.density);
    at_n = asymptotic_from_eigenstates(basis, init.density, cfg.steps);
    j["method"] = "common-eigenstates";
  } else {
    throw CapacityError("operator space dimension " +
                        std::to_string(static_cast<long long>(model.dimension()) * model.dimension()) +
                        " exceeds the dense attractor solver limit of " +
                        std::to_string(kMaxSolverOperatorDim) + "; use 'evolve'");
  }
  const auto stat = make_report(0, stationary, model.lattice());
  const auto nrep = make_report(cfg.steps, at_n, model.lattice());
  if (cfg.format == "csv") {
    emit(cfg, io::distribution_to_csv(stat.position));
    return 0;
  }
  j["stationary"] = {{"position", stat.position}, {"manhattan", stat.manhattan}, {"tv", stat.tv}};
  j["at_n"] = {{"n", cfg.steps}, {"position", nrep.position}, {"manhattan", nrep.manhattan}};
  j["warnings"] = warnings_json(model);
  emit_json(cfg, j);
  return 0;
}

int run_edge_states(const cli::RunConfig& cfg) {
  const WalkModel& model = *cfg.model;
  if (model.lattice().kind() != LatticeKind::Line || cfg.coin_kind != "su2" ||
      !model.uses_default_reflection()) {
    throw ValidationError("edge-states needs a line lattice, an su2 coin and the default reflection");
  }
  require_interior(model, "edge-states");
  const auto params = su2_params(cfg);
  const int n = model.lattice().vertex_count();
  const auto init = cli::resolve_initial(cfg.initial, model.lattice());
  const auto profile = analytic1d::edge_state_profile(params, n, init.density);
  const auto closed = analytic1d::edge_state_distribution(profile, n);
  const auto numeric = analytic1d::edge_state_distribution_attractors(params, n, init.density);
  double diff = 0.0;
  for (int s = 0; s < n; ++s) diff = std::max(diff, std::abs(closed[s] - numeric[s]));
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "s,closed_form,attractors\n";
    for (int s = 0; s < n; ++s) {
      os << s << ',' << io::format_double(closed[s]) << ',' << io::format_double(numeric[s]) << '\n';
    }
    emit(cfg, os.str());
    return 0;
  }
  Json j;
  j["command"] = "edge-states";
  j["q"] = profile.q;
  j["normalizer"] = profile.normalizer;
  j["o1"] = profile.o1;
  j["o2"] = profile.o2;
  j["closed_form"] = closed;
  j["attractors"] = numeric;
  j["max_difference"] = diff;
  emit_json(cfg, j);
  return 0;
}

int resolve_site(const cli::RunConfig& cfg, const Lattice& lattice) {
  if (cfg.site) return cli::parse_site(*cfg.site, lattice);
  std::istringstream ss(cfg.initial);
  std::string token;
  while (ss >> token) {
    if (token.rfind("site:", 0) == 0) return cli::parse_site(token.substr(5), lattice);
  }
  return 0;
}

int run_grover_demo(const cli::RunConfig& cfg) {
  require_json(cfg, "grover-demo");
  const WalkModel& model = *cfg.model;
  if (!grover_walk(model)) {
    throw ValidationError("grover-demo needs a grid lattice, the grover coin and the default reflection");
  }
  require_interior(model, "grover-demo");
  const Lattice& lat = model.lattice();
  const auto inv = analytic2d::grover_eigenstates(model);
  const auto predicted = analytic2d::predicted_attractor_count(lat);
  Json j;
  j["command"] = "grover-demo";
  j["lattice"] = lat.describe();

  Json members = Json::array();
  for (const auto& e : inv.raw) {
    members.push_back({{"kind", analytic2d::to_string(e.kind)},
                       {"s", e.s},
                       {"t", e.t},
                       {"alpha", e.alpha},
                       {"residual", e.residual}});
  }
  j["inventory"] = {{"accepted", members},
                    {"rejected", inv.rejected.size()},
                    {"basis_size", inv.basis.size()},
                    {"contributed",
                     {{"phi1", inv.contributed[0]},
                      {"phi2", inv.contributed[1]},
                      {"phi3", inv.contributed[2]},
                      {"phi4", inv.contributed[3]}}}};
  const long long r = static_cast<long long>(inv.basis.size());
  std::optional<std::vector<Attractor>> space;
  if (solver_fits(model)) space = attractor_space_numeric(model);
  j["attractor_count"] = {{"predicted", predicted.predicted},
                          {"from_eigenstates", r * r + 1},
                          {"numeric", space ? Json(space->size()) : Json(nullptr)}};

  const auto init = cli::resolve_initial(cfg.initial, lat);
  const int site = resolve_site(cfg, lat);
  const Matrix stationary = space ? asymptotic_decomposition(*space, init.density).stationary_part()
                                  : stationary_from_eigenstates(inv.basis, init.density);
  const double trapped = position_marginal(stationary, lat.coin_dim())[site];
  const auto run = run_exact(model, init.density, cfg.steps, cfg.record_every);
  Json series = Json::array();
  for (const auto& rep : run.reports) series.push_back({{"n", rep.step}, {"p", rep.position[site]}});
  j["trapping"] = {{"site", site},
                   {"uniform", 1.0 / lat.vertex_count()},
                   {"asymptotic", trapped},
                   {"series", series}};
  emit_json(cfg, j);
  return 0;
}

// ---- verify ----

struct Check {
  std::string name;
  bool passed;
  double value;
  double tolerance;
  std::string detail;
};

void record(std::vector<Check>& checks, std::string name, double value, double tol,
            std::string detail = {}) {
  checks.push_back({std::move(name), value < tol, value, tol, std::move(detail)});
}

Matrix random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
  }
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

int run_verify(const cli::RunConfig& cfg) {
  require_json(cfg, "verify");
  const WalkModel& model = *cfg.model;
  const Lattice& lat = model.lattice();
  const int d = model.dimension();
  std::vector<Check> checks;
  std::vector<std::string> skipped;
  std::mt19937_64 rng(cfg.seed);

  const auto configs = verification_configs(lat);
  {
    const Matrix c = model.coin();
    record(checks, "coin_unitary",
           linalg::max_abs(c * c.adjoint() - Matrix::Identity(c.rows(), c.cols())), 1e-12);
    const Matrix r = model.reflection();
    record(checks, "reflection_unitary",
           linalg::max_abs(r * r.adjoint() - Matrix::Identity(r.rows(), r.cols())), 1e-12);
    double worst = 0.0;
    for (const auto& k : configs) {
      const Matrix u = build_unitary(model, k);
      worst = std::max(worst, linalg::max_abs(u * u.adjoint() - Matrix::Identity(d, d)));
    }
    record(checks, "step_unitary", worst, 1e-12, std::to_string(configs.size()) + " configs");
  }

  const Matrix rho = random_density(d, rng);
  const Matrix stepped = step_exact_factorized(model, rho);
  record(checks, "trace_preserved", std::abs(stepped.trace() - Complex(1.0, 0.0)), 1e-12);
  record(checks, "hermiticity_preserved", linalg::max_abs(stepped - stepped.adjoint()), 1e-12);
  if (lat.edge_count() <= 10) {
    record(checks, "factorized_matches_bruteforce",
           linalg::max_abs(stepped - step_exact_bruteforce(model, rho)), 1e-12);
  } else {
    skipped.push_back("factorized_matches_bruteforce: more than 10 edges");
  }

  if (!solver_fits(model)) {
    skipped.push_back("attractor suites: operator space exceeds the dense solver limit");
  } else {
    const auto attractors = attractor_space_numeric(model);
    double worst_res = 0.0, worst_ortho = 0.0, worst_trace = 0.0;
    for (std::size_t a = 0; a < attractors.size(); ++a) {
      worst_res = std::max(worst_res, verify_attractor(model, attractors[a], configs));
      for (std::size_t b = a; b < attractors.size(); ++b) {
        const Complex g = linalg::hs_inner(attractors[a].matrix, attractors[b].matrix);
        worst_ortho = std::max(worst_ortho, std::abs(g - Complex(a == b ? 1.0 : 0.0, 0.0)));
      }
      if (std::abs(attractors[a].lambda - Complex(1.0, 0.0)) > 1e-8) {
        const int c = model.coin_dim();
        for (int x = 0; x < lat.vertex_count(); ++x) {
          worst_trace = std::max(worst_trace, std::abs(attractors[a].matrix.block(x * c, x * c, c, c).trace()));
        }
      }
    }
    record(checks, "attractor_residuals", worst_res, 1e-10, std::to_string(attractors.size()) + " attractors");
    record(checks, "attractor_orthonormality", worst_ortho, 1e-10);
    record(checks, "attractor_block_traceless", worst_trace, 1e-10);
    {
      Matrix id = Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
      for (const auto& a : attractors) {
        if (std::abs(a.lambda - Complex(1.0, 0.0)) < 1e-8) id -= linalg::hs_inner(id, a.matrix) * a.matrix;
      }
      record(checks, "identity_in_fixed_space", linalg::hs_norm(id), 1e-10);
    }

    if (!model.probs().strictly_interior()) {
      skipped.push_back("convergence: some p lies on the boundary of [0, 1]");
    } else if (d > 64) {
      skipped.push_back("convergence: dimension above 64");
    } else {
      const auto dec = asymptotic_decomposition(attractors, rho);
      const FactorizedStepper stepper(model);
      Matrix cur = rho;
      double best = linalg::hs_norm(cur - dec.evaluate(0));
      int at = 0;
      for (int n = 1; n <= 5000 && best >= 1e-6; ++n) {
        cur = stepper.step(cur);
        const double gap = linalg::hs_norm(cur - dec.evaluate(n));
        if (gap < best) {
          best = gap;
          at = n;
        }
      }
      record(checks, "convergence_to_asymptotic", best, 1e-6, "n = " + std::to_string(at));
    }

    if (!lat.is_2d() && cfg.coin_kind == "su2" && model.uses_default_reflection()) {
      const auto params = su2_params(cfg);
      try {
        analytic1d::validate(params);
        const auto catalog = lat.kind() == LatticeKind::Line
                                 ? analytic1d::attractor_catalog_line(params, lat.vertex_count())
                                 : analytic1d::attractor_catalog_cycle(params, lat.vertex_count());
        double worst_angle = 0.0;
        bool counts_match = true;
        const auto num_summary = dimension_summary(attractors);
        const auto cat_summary = dimension_summary(catalog);
        counts_match = num_summary.size() == cat_summary.size();
        for (std::size_t i = 0; counts_match && i < num_summary.size(); ++i) {
          counts_match = std::abs(num_summary[i].first - cat_summary[i].first) < 1e-8 &&
                         num_summary[i].second == cat_summary[i].second;
        }
        if (counts_match) {
          for (const auto& [lambda, count] : num_summary) {
            Matrix a(d * d, count), b(d * d, count);
            int ia = 0, ib = 0;
            for (const auto& x : attractors) {
              if (std::abs(x.lambda - lambda) < 1e-8) a.col(ia++) = linalg::vec(x.matrix);
            }
            for (const auto& x : catalog) {
              if (std::abs(x.lambda - lambda) < 1e-8) b.col(ib++) = linalg::vec(x.matrix);
            }
            worst_angle = std::max(worst_angle, linalg::max_principal_angle(a, b));
          }
        }
        record(checks, "catalog_counts_match", counts_match ? 0.0 : 1.0, 0.5);
        record(checks, "catalog_principal_angles", counts_match ? worst_angle : 1.0, 1e-8);
      } catch (const DomainError& e) {
        skipped.push_back(std::string("1D catalog: ") + e.what());
      }
    }
    if (grover_walk(model)) {
      const auto predicted = analytic2d::predicted_attractor_count(lat).predicted;
      record(checks, "grover_count_matches_prediction",
             std::abs(static_cast<double>(attractors.size()) - static_cast<double>(predicted)), 0.5,
             std::to_string(attractors.size()) + " vs " + std::to_string(predicted));
    }
  }

  bool all = true;
  Json report = Json::array();
  std::ostringstream text;
  for (const auto& c : checks) {
    all = all && c.passed;
    char line[160];
    std::snprintf(line, sizeof line, "%s %-34s value=%.3e tol=%.1e", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.tolerance);
    text << line << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
    report.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                      {"tolerance", c.tolerance}, {"detail", c.detail}});
  }
  for (const auto& s : skipped) text << "SKIP " << s << '\n';
  text << (all ? "all checks passed" : "verification failed") << '\n';
  std::cout << text.str();
  if (!cfg.output.empty()) {
    emit_json(cfg, Json{{"checks", report}, {"skipped", skipped}, {"passed", all}});
  }
  return all ? 0 : kExitVerification;
}

void apply_overrides(cli::RunConfig& cfg, const Overrides& o) {
  if (o.steps) {
    if (*o.steps < 0) throw ValidationError("--steps must be non-negative");
    cfg.steps = *o.steps;
  }
  if (o.shots) {
    if (*o.shots < 1) throw ValidationError("--shots must be at least 1");
    cfg.shots = *o.shots;
  }
  if (o.threads) {
    if (*o.threads < 1) throw ValidationError("--threads must be at least 1");
    cfg.threads = *o.threads;
  }
  if (o.record_every) {
    if (*o.record_every < 1) throw ValidationError("--record-every must be at least 1");
    cfg.record_every = *o.record_every;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.initial) cfg.initial = *o.initial;
  if (o.format) cfg.format = *o.format;
  if (o.output) cfg.output = *o.output;
  if (o.engine) cfg.engine = *o.engine;
  if (o.site) cfg.site = *o.site;
}

int dispatch(const std::string& command, cli::RunConfig& cfg) {
  for (const auto& w : cfg.model->warnings()) std::cerr << "warning: " << w << '\n';
  if (command == "evolve") return run_evolve(cfg);
  if (command == "attractors") return run_attractors(cfg);
  if (command == "asymptotic") return run_asymptotic(cfg);
  if (command == "edge-states") return run_edge_states(cfg);
  if (command == "grover-demo") return run_grover_demo(cfg);
  return run_verify(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coined quantum walks on dynamically percolating graphs"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  Overrides o;
  app.add_option("-c,--config", o.config_path, "Model configuration file")->required();
  app.add_option("--steps", o.steps, "Number of steps");
  app.add_option("--shots", o.shots, "Monte-Carlo trajectories");
  app.add_option("--seed", o.seed, "Monte-Carlo seed");
  app.add_option("--threads", o.threads, "Worker threads for trajectory sampling");
  app.add_option("--record-every", o.record_every, "Report interval in steps");
  app.add_option("--initial", o.initial, "Initial state specification");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", o.output, "Output file (default stdout)");
  app.add_option("--engine", o.engine, "Evolution engine")->check(CLI::IsMember({"exact", "montecarlo"}));
  app.add_option("--site", o.site, "Site for the trapping series, s or s,t");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"evolve", "Time series of observables"},
      {"attractors", "Attractor space of the walk"},
      {"asymptotic", "Asymptotic state from the attractor expansion"},
      {"edge-states", "Closed-form and attractor-based edge-state profile"},
      {"grover-demo", "Grover eigenstates, attractor counts and trapping"},
      {"verify", "Run the invariant checks on the configured model"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    cli::RunConfig cfg = cli::load_config(o.config_path);
    apply_overrides(cfg, o);
    std::string command;
    if (!app.get_subcommands().empty()) {
      command = app.get_subcommands().front()->get_name();
    } else if (cfg.command) {
      command = *cfg.command;
    } else {
      std::cerr << "error: no command given on the command line or in the config\n";
      return kExitUsage;
    }
    return dispatch(command, cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
