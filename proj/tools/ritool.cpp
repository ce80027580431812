// Command-line front end for the rearrangement-invariant function-space
// toolkit. Talks to the library exclusively through the C interface.
//
// Exit codes: 0 success (including "divergent" norm answers), 2 a requested
// check or experiment ran but did not pass, 1 usage or input errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rispace.h"

using nlohmann::json;

namespace {

[[noreturn]] void die(const std::string& msg) {
  std::cerr << "ritool: " << msg << "\n";
  std::exit(1);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "@file" loads the file; anything else is returned verbatim.
std::string deref(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return slurp(arg.substr(1));
  return arg;
}

json num_or_inf_token(const std::string& tok) {
  if (tok == "inf" || tok == "Inf" || tok == "infinity") return "inf";
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    die("cannot parse number '" + tok + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Space argument: raw JSON, @file, or a shorthand such as
//   L2  Linf  lebesgue:2  lorentz:2,1  lz:2,2,-0.5  grand:2,1  small:2,1
//   ggamma:1,1,-1,0[,0.5,0]
std::string parse_space_arg(const std::string& raw) {
  std::string s = deref(raw);
  if (!s.empty() && (s[0] == '{' || s[0] == '[')) return s;
  if (s.size() >= 2 && s[0] == 'L' && s.find(':') == std::string::npos) {
    json j = {{"kind", "lebesgue"}, {"p", num_or_inf_token(s.substr(1))}};
    return j.dump();
  }
  auto pos = s.find(':');
  if (pos == std::string::npos) die("cannot parse space '" + raw + "'");
  std::string kind = s.substr(0, pos);
  std::vector<std::string> args = split(s.substr(pos + 1), ',');
  auto need = [&](size_t lo, size_t hi) {
    if (args.size() < lo || args.size() > hi)
      die("space shorthand '" + raw + "' has the wrong number of parameters");
  };
  json j;
  if (kind == "lebesgue") {
    need(1, 1);
    j = {{"kind", "lebesgue"}, {"p", num_or_inf_token(args[0])}};
  } else if (kind == "lorentz") {
    need(2, 2);
    j = {{"kind", "lorentz"},
         {"p", num_or_inf_token(args[0])},
         {"q", num_or_inf_token(args[1])}};
  } else if (kind == "lz" || kind == "lorentz_zygmund") {
    need(3, 3);
    j = {{"kind", "lorentz_zygmund"},
         {"p", num_or_inf_token(args[0])},
         {"q", num_or_inf_token(args[1])},
         {"lambda", num_or_inf_token(args[2])}};
  } else if (kind == "grand" || kind == "small") {
    need(2, 2);
    j = {{"kind", kind},
         {"p", num_or_inf_token(args[0])},
         {"alpha", num_or_inf_token(args[1])}};
  } else if (kind == "ggamma") {
    need(4, 6);
    j = {{"kind", "ggamma"},
         {"p", num_or_inf_token(args[0])},
         {"m", num_or_inf_token(args[1])},
         {"w1",
          {{"a", num_or_inf_token(args[2])}, {"b", num_or_inf_token(args[3])}}}};
    if (args.size() == 6)
      j["w2"] = {{"a", num_or_inf_token(args[4])},
                 {"b", num_or_inf_token(args[5])}};
  } else {
    die("unknown space kind '" + kind + "'");
  }
  return j.dump();
}

// Shared function-input flags: exactly one of --indicator / --constant /
// --function must be given.
struct FunctionArgs {
  double indicator = -1.0;
  double value = 1.0;
  double constant = 0.0;
  bool has_constant = false;
  std::string function_json;

  void attach(CLI::App* cmd) {
    cmd->add_option("--indicator", indicator,
                    "indicator function of a set with this measure");
    cmd->add_option("--value", value,
                    "height of the indicator (default 1)");
    cmd->add_option_function<double>(
           "--constant",
           [this](double v) {
             constant = v;
             has_constant = true;
           },
           "constant function with this value on the whole domain");
    cmd->add_option("--function", function_json,
                    "function as JSON [[value,measure],...] or @file");
  }

  ri_function* build() const {
    int given = (indicator >= 0.0) + has_constant + !function_json.empty();
    if (given != 1)
      die("give exactly one of --indicator, --constant, --function");
    ri_function* f = nullptr;
    ri_status st;
    if (indicator >= 0.0) {
      double m = indicator, v = value;
      st = ri_function_create(&v, &m, 1, &f);
    } else if (has_constant) {
      double m = 1.0, v = constant;
      st = ri_function_create(&v, &m, 1, &f);
    } else {
      st = ri_function_from_json(deref(function_json).c_str(), &f);
    }
    if (st != RI_OK) die(ri_last_error());
    return f;
  }
};

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) die("cannot write '" + out_path + "'");
  out << text;
}

std::string take_string(char* owned) {
  std::string s = owned ? owned : "";
  ri_string_free(owned);
  return s;
}

// Assembles the experiment configuration shared by verify/holder/table/bounds
// and runs it through the C interface.
struct ExperimentCmd {
  std::string config;
  std::string variant;
  double p = 0.0;
  int dim = 0;
  std::vector<int> levels;
  int samples = 0;
  std::optional<std::uint64_t> seed;
  double solver_tol = 0.0;
  double k = 0.0, r = 0.0;
  std::optional<double> lambda;
  double pstar_override = 0.0;
  std::string src, tgt, x0, x1;
  std::optional<double> theta, q, alpha;
  std::string potential;
  int family_size = 0;
  double budget = 0.0;
  std::string format = "json";
  std::string out_path;
  bool with_seconds = false;

  void attach(CLI::App* cmd, const std::string& experiment) {
    cmd->add_option("--config", config, "base configuration JSON or @file");
    cmd->add_option("--variant", variant, "experiment variant");
    cmd->add_option("--p", p, "p-Laplacian exponent");
    cmd->add_option("--dim", dim, "domain dimension (1 or 2)");
    cmd->add_option("--levels", levels, "grid sizes (cells per axis)");
    cmd->add_option("--samples", samples, "number of samples");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--tol", solver_tol, "solver tolerance");
    cmd->add_option("--k", k, "source Lorentz primary exponent");
    cmd->add_option("--r", r, "secondary exponent");
    cmd->add_option("--lambda", lambda, "logarithmic exponent");
    cmd->add_option("--pstar-override", pstar_override,
                    "effective Sobolev exponent when p >= dim");
    cmd->add_option_function<std::string>(
           "--src", [this](const std::string& v) { src = parse_space_arg(v); },
           "source space (shorthand or JSON)");
    cmd->add_option_function<std::string>(
           "--tgt", [this](const std::string& v) { tgt = parse_space_arg(v); },
           "target space (shorthand or JSON)");
    cmd->add_option_function<std::string>(
           "--x0", [this](const std::string& v) { x0 = parse_space_arg(v); },
           "first couple member");
    cmd->add_option_function<std::string>(
           "--x1", [this](const std::string& v) { x1 = parse_space_arg(v); },
           "second couple member");
    cmd->add_option("--theta", theta, "interpolation parameter theta");
    cmd->add_option("--q", q, "interpolation parameter q");
    cmd->add_option("--alpha", alpha, "interpolation parameter alpha");
    cmd->add_option("--potential", potential, "potential spec JSON or @file");
    cmd->add_option("--family-size", family_size, "test family size");
    cmd->add_option("--budget", budget, "ratio budget for bounded-ratio tests");
    cmd->add_option("--format", format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", out_path, "write output to this file");
    cmd->add_flag("--seconds", with_seconds,
                  "include wall-clock timings (off: deterministic output)");
    this->experiment = experiment;
  }

  std::string experiment;

  int run() const {
    json cfg = json::object();
    if (!config.empty()) {
      try {
        cfg = json::parse(deref(config));
      } catch (const json::exception& e) {
        die(std::string("config: ") + e.what());
      }
    }
    cfg["experiment"] = experiment;
    if (!variant.empty()) cfg["variant"] = variant;
    if (p > 0.0) cfg["p"] = p;
    if (dim > 0) cfg["dim"] = dim;
    if (!levels.empty()) cfg["levels"] = levels;
    if (samples > 0) cfg["samples"] = samples;
    if (seed) cfg["seed"] = *seed;
    if (solver_tol > 0.0) cfg["solver_tol"] = solver_tol;
    if (k > 0.0) cfg["k"] = k;
    if (r > 0.0) cfg["r"] = r;
    if (lambda) cfg["lambda"] = *lambda;
    if (pstar_override > 0.0) cfg["pstar_override"] = pstar_override;
    if (!src.empty()) cfg["src"] = json::parse(src);
    if (!tgt.empty()) cfg["tgt"] = json::parse(tgt);
    if (!x0.empty() || !x1.empty()) {
      if (x0.empty() || x1.empty()) die("give both --x0 and --x1");
      cfg["couple"] = {{"x0", json::parse(x0)}, {"x1", json::parse(x1)}};
    }
    if (theta || q || alpha) {
      json prm = cfg.value("params", json::object());
      if (theta) prm["theta"] = *theta;
      if (q) prm["q"] = *q;
      if (alpha) prm["alpha"] = *alpha;
      cfg["params"] = prm;
    }
    if (!potential.empty()) cfg["potential"] = json::parse(deref(potential));
    if (family_size > 0) cfg["family_size"] = family_size;
    if (budget > 0.0) cfg["budget"] = budget;

    std::string text = cfg.dump();
    if (format == "csv") {
      char* csv = nullptr;
      ri_status st = ri_experiment_csv(text.c_str(), with_seconds ? 1 : 0, &csv);
      if (st != RI_OK) die(ri_last_error());
      write_output(take_string(csv), out_path);
      return 0;
    }
    char* payload = nullptr;
    ri_status st = ri_experiment_run(text.c_str(), &payload);
    if (st != RI_OK) die(ri_last_error());
    json res = json::parse(take_string(payload));
    if (!with_seconds)
      for (auto& row : res["rows"]) row["seconds"] = 0.0;
    write_output(res.dump(2), out_path);
    return res.value("pass", false) ? 0 : 2;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "numerical toolkit for rearrangement-invariant norms, logarithmic "
      "interpolation, and p-Laplacian regularity experiments"};
  app.require_subcommand(1);

  // --- norm ---------------------------------------------------------------
  auto* norm_cmd = app.add_subcommand("norm", "norm of a function in a space");
  std::string norm_space;
  FunctionArgs norm_fn;
  norm_cmd
      ->add_option_function<std::string>(
          "--space",
          [&](const std::string& v) { norm_space = parse_space_arg(v); },
          "function space (shorthand or JSON)")
      ->required();
  norm_fn.attach(norm_cmd);

  // --- kfunc --------------------------------------------------------------
  auto* kfunc_cmd =
      app.add_subcommand("kfunc", "Peetre K-functional K(f, t; X0, X1)");
  std::string kf_x0 = "L1", kf_x1 = "Linf";
  std::vector<double> kf_ts;
  FunctionArgs kf_fn;
  kfunc_cmd->add_option_function<std::string>(
      "--x0", [&](const std::string& v) { kf_x0 = v; }, "first couple member");
  kfunc_cmd->add_option_function<std::string>(
      "--x1", [&](const std::string& v) { kf_x1 = v; }, "second couple member");
  kfunc_cmd->add_option("--t", kf_ts, "evaluation points (0 < t)");
  kf_fn.attach(kfunc_cmd);

  // --- identify -----------------------------------------------------------
  auto* id_cmd = app.add_subcommand(
      "identify", "identify the logarithmic interpolation space");
  std::string id_x0 = "L1", id_x1 = "Linf";
  double id_theta = 0.5, id_q = 1.0, id_alpha = 0.0;
  id_cmd->add_option_function<std::string>(
      "--x0", [&](const std::string& v) { id_x0 = v; }, "first couple member");
  id_cmd->add_option_function<std::string>(
      "--x1", [&](const std::string& v) { id_x1 = v; }, "second couple member");
  id_cmd->add_option("--theta", id_theta, "theta in [0, 1]");
  id_cmd->add_option("--q", id_q, "exponent q");
  id_cmd->add_option("--alpha", id_alpha, "logarithmic exponent alpha");

  // --- solve --------------------------------------------------------------
  auto* solve_cmd =
      app.add_subcommand("solve", "p-Laplacian Dirichlet problem");
  int sv_dim = 1, sv_n = 0;
  double sv_p = 2.0, sv_tol = 1e-10, sv_radius = 0.45;
  std::string sv_domain, sv_f = "const:1", sv_potential, sv_gnorm, sv_unorm,
              sv_out;
  solve_cmd->add_option("--dim", sv_dim, "dimension (1 or 2)");
  solve_cmd->add_option("--n", sv_n, "cells per axis");
  solve_cmd->add_option("--p", sv_p, "p-Laplacian exponent (> 1)");
  solve_cmd->add_option("--tol", sv_tol, "residual tolerance");
  solve_cmd->add_option("--domain", sv_domain, "interval, square, or disk");
  solve_cmd->add_option("--radius", sv_radius, "disk radius");
  solve_cmd->add_option("--f", sv_f,
                        "data: const:<v>, descriptor:@file, values:@file");
  solve_cmd->add_option("--potential", sv_potential, "potential JSON or @file");
  solve_cmd->add_option_function<std::string>(
      "--gradient-norm",
      [&](const std::string& v) { sv_gnorm = parse_space_arg(v); },
      "also report the gradient magnitude norm in this space");
  solve_cmd->add_option_function<std::string>(
      "--solution-norm",
      [&](const std::string& v) { sv_unorm = parse_space_arg(v); },
      "also report the solution norm in this space");
  solve_cmd->add_option("--out", sv_out, "write result JSON to this file");

  // --- experiments ----------------------------------------------------------
  ExperimentCmd verify_cmd, holder_cmd, table_cmd, bounds_cmd;
  verify_cmd.attach(
      app.add_subcommand("verify",
                         "verify an identification, embedding, or equivalence "
                         "over a function family"),
      "verify");
  holder_cmd.attach(
      app.add_subcommand("holder",
                         "Hölder-constant sweep for the data-to-gradient map"),
      "holder");
  table_cmd.attach(
      app.add_subcommand("table", "regularity table over a graded data family"),
      "table");
  bounds_cmd.attach(
      app.add_subcommand("bounds", "uniform and composite gradient bounds"),
      "bounds");

  CLI11_PARSE(app, argc, argv);

  if (norm_cmd->parsed()) {
    ri_function* f = norm_fn.build();
    double v = 0.0;
    ri_status st = ri_norm(f, norm_space.c_str(), &v);
    ri_function_free(f);
    if (st == RI_ERR_DIVERGENT) {
      std::cout << "divergent\n";
      return 0;
    }
    if (st != RI_OK) die(ri_last_error());
    std::printf("%.17g\n", v);
    return 0;
  }

  if (kfunc_cmd->parsed()) {
    json couple = {{"x0", json::parse(parse_space_arg(kf_x0))},
                   {"x1", json::parse(parse_space_arg(kf_x1))}};
    std::string cj = couple.dump();
    if (kf_ts.empty())
      for (int i = 0; i <= 8; ++i) kf_ts.push_back(std::pow(10.0, -4.0 + 0.5 * i));
    ri_function* f = kf_fn.build();
    std::printf("t,k\n");
    for (double t : kf_ts) {
      double v = 0.0;
      ri_status st = ri_k_functional(f, cj.c_str(), t, &v);
      if (st != RI_OK) {
        ri_function_free(f);
        die(ri_last_error());
      }
      std::printf("%.17g,%.17g\n", t, v);
    }
    ri_function_free(f);
    return 0;
  }

  if (id_cmd->parsed()) {
    json couple = {{"x0", json::parse(parse_space_arg(id_x0))},
                   {"x1", json::parse(parse_space_arg(id_x1))}};
    json params = {{"theta", id_theta}, {"q", id_q}, {"alpha", id_alpha}};
    char* out = nullptr;
    ri_status st =
        ri_identify(couple.dump().c_str(), params.dump().c_str(), &out);
    if (st != RI_OK) die(ri_last_error());
    std::cout << json::parse(take_string(out)).dump(2) << "\n";
    return 0;
  }

  if (solve_cmd->parsed()) {
    json cfg = {{"dim", sv_dim}, {"p", sv_p}, {"tol", sv_tol}};
    if (sv_n > 0) cfg["n"] = sv_n;
    if (!sv_domain.empty()) cfg["domain"] = sv_domain;
    cfg["radius"] = sv_radius;
    if (!sv_potential.empty()) cfg["potential"] = json::parse(deref(sv_potential));
    auto pos = sv_f.find(':');
    std::string fk = sv_f.substr(0, pos == std::string::npos ? sv_f.size() : pos);
    std::string fv = pos == std::string::npos ? "" : sv_f.substr(pos + 1);
    if (fk == "const") {
      cfg["f"] = {{"kind", "const"}, {"value", fv.empty() ? 1.0 : std::stod(fv)}};
    } else if (fk == "descriptor") {
      cfg["f"] = {{"kind", "descriptor"}, {"descriptor", json::parse(deref(fv))}};
    } else if (fk == "values") {
      cfg["f"] = {{"kind", "values"}, {"values", json::parse(deref(fv))}};
    } else {
      die("cannot parse --f '" + sv_f + "'");
    }
    if (!sv_gnorm.empty()) cfg["gradient_norm_space"] = json::parse(sv_gnorm);
    if (!sv_unorm.empty()) cfg["solution_norm_space"] = json::parse(sv_unorm);
    char* out = nullptr;
    ri_status st = ri_solve(cfg.dump().c_str(), &out);
    if (st != RI_OK) die(ri_last_error());
    json res = json::parse(take_string(out));
    if (sv_out.empty()) {
      res.erase("values");  // keep the console summary small
      res.erase("grid");
    }
    write_output(res.dump(2), sv_out);
    return 0;
  }

  for (const ExperimentCmd* e : {&verify_cmd, &holder_cmd, &table_cmd, &bounds_cmd})
    if (app.get_subcommand(e->experiment)->parsed()) return e->run();

  return 0;
}
