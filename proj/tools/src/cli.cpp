#include "cli.hpp"

#include "vtk.hpp"

#include "sgfem/analysis.hpp"
#include "sgfem/verification.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sgfem::tools {

using nlohmann::json;

void to_json(json& j, const RunConfig& c) {
  j = json{{"command", c.command}, {"dim", c.dim},         {"example", c.example},       {"lambda", c.lambda},
           {"mu", c.mu},           {"iota", c.iota},       {"levels", c.levels},         {"n", c.n},
           {"solver", c.solver},   {"tol", c.tol},         {"out", c.out},               {"seed", c.seed},
           {"suite", c.suite},     {"samples", c.samples}, {"zero_load", c.zero_load},   {"allow_large", c.allow_large},
           {"audit", c.audit}};
}

void from_json(const json& j, RunConfig& c) {
  RunConfig d;
  c.command = j.value("command", d.command);
  c.dim = j.value("dim", d.dim);
  c.example = j.value("example", d.example);
  c.lambda = j.value("lambda", d.lambda);
  c.mu = j.value("mu", d.mu);
  c.iota = j.value("iota", d.iota);
  c.levels = j.value("levels", d.levels);
  c.n = j.value("n", d.n);
  c.solver = j.value("solver", d.solver);
  c.tol = j.value("tol", d.tol);
  c.out = j.value("out", d.out);
  c.seed = j.value("seed", d.seed);
  c.suite = j.value("suite", d.suite);
  c.samples = j.value("samples", d.samples);
  c.zero_load = j.value("zero_load", d.zero_load);
  c.allow_large = j.value("allow_large", d.allow_large);
  c.audit = j.value("audit", d.audit);
}

namespace {

const std::vector<std::string> kSuites = {"all", "korn", "element", "coercivity", "interpolation"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

MaterialParams params_for(const RunConfig& c, double iota) { return {c.lambda, c.mu, iota}; }

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions s;
  s.method = parse_solver(c.solver);
  s.tol = c.tol;
  return s;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path + "'");
}

void write_config(const RunConfig& c) {
  if (c.out.empty()) return;
  write_text(join(c.out, "config.json"), json(c).dump(2) + "\n");
}

json error_json(const ErrorNorms& e) {
  return json{{"L2", e.l2}, {"H1", e.h1}, {"H2broken", e.h2}, {"energy", e.energy}, {"energy_rel", e.energy_rel}};
}

}  // namespace

std::vector<double> iota_values(const RunConfig& c) {
  if (!c.iota.empty()) return c.iota;
  if (c.command == "convergence") return {1.0, 1e-2, 1e-4, 1e-6};
  if (c.command == "verify") return {1.0, 1e-2, 1e-6};
  return {1.0};
}

int initial_resolution(const RunConfig& c) {
  if (c.n > 0) return c.n;
  return c.dim == 2 ? 8 : 4;
}

void validate(const RunConfig& c) {
  if (c.command != "convergence" && c.command != "solve" && c.command != "verify") {
    throw Error("unknown command '" + c.command + "'");
  }
  if (c.dim != 2 && c.dim != 3) throw Error("--dim must be 2 or 3");
  if (c.example != "smooth" && c.example != "layer") throw Error("--example must be smooth or layer");
  if (c.n < 0) throw Error("--n must be positive");
  for (double i : iota_values(c)) params_for(c, i).validate();
  parse_solver(c.solver);
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw Error("--tol must lie in (0, 1)");
  if (c.command == "convergence") {
    if (c.levels < 2) throw Error("--levels must be at least 2 to compute a rate");
    if (c.levels > 12) throw Error("--levels above 12 is not supported");
    const long finest = static_cast<long>(initial_resolution(c)) << (c.levels - 1);
    if (c.dim == 3 && finest > 16 && !c.allow_large) {
      throw Error("3D runs finer than n = 16 need --allow-large (requested n = " + std::to_string(finest) + ")");
    }
  }
  if (c.command == "solve" && c.iota.size() > 1) throw Error("solve takes a single --iota value");
  if (c.command == "verify") {
    if (std::find(kSuites.begin(), kSuites.end(), c.suite) == kSuites.end()) {
      throw Error("unknown suite '" + c.suite + "' (expected all, korn, element, coercivity or interpolation)");
    }
    if (c.samples < 1) throw Error("--samples must be positive");
  }
}

int cmd_convergence(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ensure_dir(c.out);
  write_config(c);
  json summary = json::array();
  bool audit_ok = true;
  for (double iota : iota_values(c)) {
    StudyOptions opt;
    opt.example = c.example;
    opt.dim = c.dim;
    opt.params = params_for(c, iota);
    opt.n = level_sequence(initial_resolution(c), c.levels);
    opt.solver = solve_options(c);
    opt.audit = c.audit;
    opt.progress = [&](const ErrorRow& row) {
      err << "iota " << fmt("%.0e", iota) << " n " << row.n << ": dofs " << row.dofs << ", energy_rel "
          << fmt("%.4e", row.err.energy_rel) << ", " << to_string(row.solve.method) << " solve "
          << fmt("%.2f", row.solve.seconds) << " s\n";
    };
    const ErrorReport rep = convergence_study(opt);

    std::ostringstream csv, md;
    write_csv(csv, rep);
    write_markdown(md, rep);
    out << md.str() << '\n';
    const std::string stem = "convergence_" + c.example + "_d" + std::to_string(c.dim) + "_iota" + fmt("%.0e", iota);
    if (!c.out.empty()) {
      write_text(join(c.out, stem + ".csv"), csv.str());
      write_text(join(c.out, stem + ".md"), md.str());
    }

    json levels = json::array();
    for (const ErrorRow& row : rep.rows) {
      json l = {{"n", row.n}, {"h", row.h}, {"dofs", row.dofs}, {"errors", error_json(row.err)},
                {"relative_residual", row.solve.relative_residual}, {"solver", to_string(row.solve.method)}};
      if (std::isfinite(row.rate)) l["rate"] = row.rate;
      if (c.audit) {
        const double bound = 5.0 * (row.interp_energy + row.osc);
        const bool ok = std::isfinite(bound) && row.err.energy <= bound;
        audit_ok = audit_ok && ok;
        l["audit"] = {{"interp_energy", row.interp_energy}, {"osc", row.osc}, {"bound", bound}, {"pass", ok}};
      }
      levels.push_back(l);
    }
    summary.push_back({{"iota", iota}, {"levels", levels}});
  }
  if (!c.out.empty()) write_text(join(c.out, "summary.json"), summary.dump(2) + "\n");
  if (!audit_ok) {
    err << "audit failed: |||u - u_h||| exceeds 5 (|||u - I_h0 u||| + Osc(f)) on some level\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ensure_dir(c.out);
  write_config(c);
  const double iota = iota_values(c).front();
  const MaterialParams p = params_for(c, iota);
  const int n = initial_resolution(c);
  const Mesh m = unit_mesh(c.dim, n);
  const DofMap dofs(m);
  const auto u = make_example(c.example, c.dim, iota);
  const SolveResult sol =
      solve_problem(m, dofs, p, c.zero_load ? nullptr : u.get(), solve_options(c));
  const DiscreteField uh(m, dofs, sol.full);

  json s = {{"dim", c.dim},
            {"n", n},
            {"cells", m.num_cells()},
            {"free_dofs", sol.free},
            {"example", c.example},
            {"iota", iota},
            {"zero_load", c.zero_load},
            {"energy", sol.energy},
            {"relative_residual", sol.report.relative_residual},
            {"solver", to_string(sol.report.method)},
            {"iterations", sol.report.iterations}};
  if (!c.zero_load) s["errors"] = error_json(error_norms(m, *u, uh.evaluator(), iota));
  out << s.dump(2) << '\n';
  err << "solve: " << fmt("%.2f", sol.report.seconds) << " s\n";
  if (!c.out.empty()) {
    write_text(join(c.out, "summary.json"), s.dump(2) + "\n");
    write_vtk_file(join(c.out, "solution.vtk"), uh, "sgfem " + c.example + " displacement");
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  ensure_dir(c.out);
  write_config(c);
  const bool all = c.suite == "all";
  bool ok = true;
  json report;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    ok = ok && pass;
  };

  if (all || c.suite == "korn") {
    const KornReport k = verify_algebraic_korn(c.dim, c.samples, c.seed);
    const double bound = c.dim == 2 ? korn_constant_sharp() : 0.25;
    const bool pass = k.min_random >= bound - 1e-12 && k.min_exact >= bound - 1e-12 &&
                      (c.dim != 2 || std::abs(k.min_adversarial - korn_constant_sharp()) <= 1e-2);
    line("korn d=" + std::to_string(c.dim), pass,
         "min random ratio " + fmt("%.6f", k.min_random) + " over " + std::to_string(k.samples) +
             " samples, adversarial " + fmt("%.6f", k.min_adversarial) + ", exact " + fmt("%.6f", k.min_exact) +
             ", bound " + fmt("%.6f", bound) + ", margin " + fmt("%.3e", k.min_random - bound));
    report["korn"] = {{"min_random", k.min_random}, {"min_adversarial", k.min_adversarial},
                      {"min_exact", k.min_exact}, {"bound", bound}, {"pass", pass}};
  }
  if (all || c.suite == "element") {
    const ElementSuiteReport e = verify_element(c.dim, 100, c.seed);
    const bool pass = e.max_duality <= 1e-10 && e.max_constraint <= 1e-10 && e.max_reproduction <= 1e-9;
    line("element d=" + std::to_string(c.dim), pass,
         "duality " + fmt("%.2e", e.max_duality) + ", constraint " + fmt("%.2e", e.max_constraint) +
             ", P2 reproduction " + fmt("%.2e", e.max_reproduction) + " on " + std::to_string(e.cells) + " cells");
    report["element"] = {{"duality", e.max_duality}, {"constraint", e.max_constraint},
                         {"reproduction", e.max_reproduction}, {"pass", pass}};
  }
  if (all || c.suite == "coercivity") {
    const Mesh m = unit_mesh(c.dim, c.dim == 2 ? 4 : 2);
    json items = json::array();
    for (double iota : iota_values(c)) {
      const CoercivityReport r = verify_coercivity(m, params_for(c, iota), 200, c.seed);
      const double worst = std::isnan(r.min_exact) ? r.min_sampled : std::min(r.min_sampled, r.min_exact);
      const bool pass = worst >= c.mu / 4.0;
      line("coercivity iota=" + fmt("%.0e", iota), pass,
           "min sampled " + fmt("%.4f", r.min_sampled) + ", min exact " + fmt("%.4f", r.min_exact) + ", mu/4 " +
               fmt("%.4f", c.mu / 4.0) + ", mu/(2+2/pi^2) " + fmt("%.4f", r.bound));
      items.push_back({{"iota", iota}, {"min_sampled", r.min_sampled}, {"min_exact", r.min_exact}, {"pass", pass}});
    }
    report["coercivity"] = items;
  }
  if (all || c.suite == "interpolation") {
    const int n0 = initial_resolution(c);
    const auto lv = verify_interpolation(c.example, c.dim, iota_values(c).front(), {n0, 2 * n0, 4 * n0});
    bool pass = true;
    std::string detail;
    for (std::size_t k = 1; k < lv.size(); ++k) {
      const double r1 = lv[k - 1].h1 / lv[k].h1;
      const double r2 = lv[k - 1].h2 / lv[k].h2;
      pass = pass && r1 >= 3.4 && r1 <= 4.6 && r2 >= 1.7 && r2 <= 2.3;
      detail += (k > 1 ? "; " : "") + std::string("n ") + std::to_string(lv[k].n) + ": H1 ratio " +
                fmt("%.3f", r1) + ", H2 ratio " + fmt("%.3f", r2);
    }
    line("interpolation d=" + std::to_string(c.dim), pass, detail);
    json items = json::array();
    for (const auto& l : lv) items.push_back({{"n", l.n}, {"H1", l.h1}, {"H2broken", l.h2}});
    report["interpolation"] = {{"levels", items}, {"pass", pass}};
  }
  if (!c.out.empty()) write_text(join(c.out, "verify.json"), report.dump(2) + "\n");
  if (!ok) err << "verify: at least one suite failed\n";
  return ok ? kExitOk : kExitFailure;
}

int run_config(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    if (c.command == "convergence") return cmd_convergence(c, out, err);
    if (c.command == "solve") return cmd_solve(c, out, err);
    return cmd_verify(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strain gradient elasticity solver (Specht triangle / NZT tetrahedron)", "sgfem"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Load a serialized RunConfig (other flags ignored)");
    sub->add_option("--dim", cfg.dim, "Space dimension (2 or 3)");
    sub->add_option("--example", cfg.example, "Manufactured solution: smooth or layer");
    sub->add_option("--lambda", cfg.lambda, "Lame lambda");
    sub->add_option("--mu", cfg.mu, "Lame mu");
    sub->add_option("--iota", cfg.iota, "Microscopic parameter(s) in (0, 1]");
    sub->add_option("--n", cfg.n, "Cells per side (initial level for convergence)");
    sub->add_option("--solver", cfg.solver, "direct, cg or auto");
    sub->add_option("--tol", cfg.tol, "Relative residual tolerance");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--seed", cfg.seed, "Random seed for property suites");
  };

  CLI::App* conv = app.add_subcommand("convergence", "Rates of convergence on uniformly refined meshes");
  common(conv);
  conv->add_option("--levels", cfg.levels, "Number of mesh levels (>= 2)");
  conv->add_flag("--allow-large", cfg.allow_large, "Permit 3D meshes finer than n = 16");
  conv->add_flag("--audit", cfg.audit, "Check the error against the interpolation and oscillation bound");

  CLI::App* slv = app.add_subcommand("solve", "Solve once and write VTK and a JSON summary");
  common(slv);
  slv->add_flag("--zero-load", cfg.zero_load, "Use f = 0");

  CLI::App* ver = app.add_subcommand("verify", "Property suites (Korn, element, coercivity, interpolation)");
  common(ver);
  ver->add_option("--suite", cfg.suite, "all, korn, element, coercivity or interpolation");
  ver->add_option("--samples", cfg.samples, "Random samples for the Korn suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      err << "usage error: cannot read config '" << config_path << "'\n";
      return kExitUsage;
    }
    try {
      cfg = json::parse(f).get<RunConfig>();
    } catch (const std::exception& e) {
      err << "usage error: invalid config '" << config_path << "': " << e.what() << '\n';
      return kExitUsage;
    }
    if (!cfg.command.empty() && cfg.command != chosen->get_name()) {
      err << "usage error: config is for command '" << cfg.command << "'\n";
      return kExitUsage;
    }
  }
  cfg.command = chosen->get_name();
  return run_config(cfg, out, err);
}

}  // namespace sgfem::tools
