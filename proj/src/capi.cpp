#include "../include/rispace.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "common.hpp"
#include "families.hpp"
#include "harness.hpp"
#include "interp.hpp"
#include "rearrange.hpp"
#include "solver.hpp"
#include "spaces.hpp"

struct ri_function {
  rispace::SimpleFunction fn{std::vector<rispace::Piece>{}};
};

struct ri_rearrangement {
  rispace::StepFunction fs{{}, {}};
};

namespace {

thread_local std::string g_last_error;

ri_status fail(ri_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

// Exception-to-status boundary. Derived exceptions are matched before their
// std bases, so spec/unsupported do not collapse into invalid_argument.
template <typename Fn>
ri_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RI_OK;
  } catch (const rispace::divergence_error& e) {
    return fail(RI_ERR_DIVERGENT, e.what());
  } catch (const rispace::convergence_failure& e) {
    return fail(RI_ERR_CONVERGENCE, e.what());
  } catch (const rispace::unsupported_embedding& e) {
    return fail(RI_ERR_UNSUPPORTED, e.what());
  } catch (const rispace::spec_error& e) {
    return fail(RI_ERR_SPEC, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RI_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(RI_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(RI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RI_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

nlohmann::json parse(const char* text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw nlohmann::json::other_error::create(
        199, std::string(what) + ": " + e.what(), nullptr);
  }
}

rispace::SpaceSpec parse_space(const char* json) {
  return parse(json, "space").get<rispace::SpaceSpec>();
}

rispace::CoupleSpec parse_couple(const char* json) {
  return parse(json, "couple").get<rispace::CoupleSpec>();
}

rispace::InterpParams parse_params(const char* json) {
  rispace::InterpParams p = parse(json, "params").get<rispace::InterpParams>();
  p.validate();
  return p;
}

}  // namespace

extern "C" {

const char* ri_last_error(void) { return g_last_error.c_str(); }

void ri_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------------------
// Functions

ri_status ri_function_create(const double* values, const double* measures,
                             size_t count, ri_function** out) {
  if (!out || (count > 0 && (!values || !measures)))
    return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    std::vector<rispace::Piece> pieces(count);
    for (size_t i = 0; i < count; ++i) pieces[i] = {values[i], measures[i]};
    *out = new ri_function{rispace::SimpleFunction(std::move(pieces))};
  });
}

ri_status ri_function_from_json(const char* json, ri_function** out) {
  if (!json || !out) return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *out = new ri_function{
        parse(json, "function").get<rispace::SimpleFunction>()};
  });
}

ri_status ri_function_to_json(const ri_function* f, char** out_json) {
  if (!f || !out_json) return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    nlohmann::json j = f->fn;
    *out_json = dup_string(j.dump());
  });
}

void ri_function_free(ri_function* f) { delete f; }

// ---------------------------------------------------------------------------
// Rearrangement machinery

ri_status ri_rearrange(const ri_function* f, ri_rearrangement** out) {
  if (!f || !out) return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = new ri_rearrangement{rispace::rearrange(f->fn)}; });
}

size_t ri_rearrangement_size(const ri_rearrangement* r) {
  return r ? r->fs.size() : 0;
}

ri_status ri_rearrangement_data(const ri_rearrangement* r, double* breaks,
                                double* levels) {
  if (!r || !breaks || !levels) return fail(RI_ERR_INVALID_ARG, "null argument");
  g_last_error.clear();
  for (size_t i = 0; i < r->fs.size(); ++i) {
    breaks[i] = r->fs.breakpoints()[i];
    levels[i] = r->fs.levels()[i];
  }
  return RI_OK;
}

void ri_rearrangement_free(ri_rearrangement* r) { delete r; }

ri_status ri_distribution(const ri_function* f, double lambda, double* out) {
  if (!f || !out) return fail(RI_ERR_INVALID_ARG, "null argument");
  if (!(lambda >= 0.0))
    return fail(RI_ERR_DOMAIN, "distribution function needs lambda >= 0");
  return guarded([&] { *out = rispace::distribution(f->fn, lambda); });
}

ri_status ri_maximal(const ri_function* f, double t, double* out) {
  if (!f || !out) return fail(RI_ERR_INVALID_ARG, "null argument");
  if (!(t > 0.0 && t <= 1.0))
    return fail(RI_ERR_DOMAIN, "maximal function needs 0 < t <= 1");
  return guarded([&] { *out = rispace::maximal(rispace::rearrange(f->fn), t); });
}

// ---------------------------------------------------------------------------
// Norms and embeddings

ri_status ri_norm(const ri_function* f, const char* space_json, double* out) {
  if (!f || !space_json || !out)
    return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = rispace::space_norm(f->fn, parse_space(space_json)); });
}

ri_status ri_norm_rearranged(const ri_rearrangement* r, const char* space_json,
                             double* out) {
  if (!r || !space_json || !out)
    return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] { *out = rispace::space_norm(r->fs, parse_space(space_json)); });
}

ri_status ri_embedding_rule(const char* src_json, const char* tgt_json,
                            char** out_rule) {
  if (!src_json || !tgt_json || !out_rule)
    return fail(RI_ERR_INVALID_ARG, "null argument");
  *out_rule = nullptr;
  ri_status st = guarded([&] {
    auto rule = rispace::find_embedding_rule(parse_space(src_json),
                                             parse_space(tgt_json));
    if (!rule)
      throw rispace::unsupported_embedding(
          "no registered rule covers this pair");
    *out_rule = dup_string(*rule);
  });
  return st;
}

ri_status ri_weight_conditions(const char* space_json, char** out_json) {
  if (!space_json || !out_json) return fail(RI_ERR_INVALID_ARG, "null argument");
  *out_json = nullptr;
  return guarded([&] {
    rispace::WeightConditionReport rep =
        rispace::check_weight_conditions(parse_space(space_json));
    nlohmann::json j = {{"c1", rep.c1},
                        {"c2", rep.c2},
                        {"doubling_constant", rep.doubling_constant}};
    *out_json = dup_string(j.dump());
  });
}

// ---------------------------------------------------------------------------
// Interpolation

ri_status ri_k_functional(const ri_function* f, const char* couple_json,
                          double t, double* out) {
  if (!f || !couple_json || !out)
    return fail(RI_ERR_INVALID_ARG, "null argument");
  if (!(t > 0.0)) return fail(RI_ERR_DOMAIN, "K-functional needs t > 0");
  return guarded([&] {
    *out = rispace::k_functional(f->fn, t, parse_couple(couple_json));
  });
}

ri_status ri_log_interp_norm(const ri_function* f, const char* couple_json,
                             const char* params_json, double* out) {
  if (!f || !couple_json || !params_json || !out)
    return fail(RI_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *out = rispace::log_interp_norm(f->fn, parse_couple(couple_json),
                                    parse_params(params_json));
  });
}

ri_status ri_identify(const char* couple_json, const char* params_json,
                      char** out_json) {
  if (!couple_json || !params_json || !out_json)
    return fail(RI_ERR_INVALID_ARG, "null argument");
  *out_json = nullptr;
  return guarded([&] {
    rispace::IdentifiedSpace id = rispace::identify_interp_space(
        parse_couple(couple_json), parse_params(params_json));
    nlohmann::json j;
    to_json(j, id);
    *out_json = dup_string(j.dump());
  });
}

ri_status ri_btheta_quotient(const char* couple_json, double t, double* out) {
  if (!couple_json || !out) return fail(RI_ERR_INVALID_ARG, "null argument");
  if (!(t > 0.0 && t < 1.0))
    return fail(RI_ERR_DOMAIN, "quotient needs 0 < t < 1");
  return guarded([&] {
    *out = rispace::btheta_quotient(parse_couple(couple_json), t);
  });
}

// ---------------------------------------------------------------------------
// Solver

ri_status ri_solve(const char* config_json, char** out_json) {
  if (!config_json || !out_json) return fail(RI_ERR_INVALID_ARG, "null argument");
  *out_json = nullptr;
  return guarded([&] {
    nlohmann::json cfg = parse(config_json, "solve config");
    int dim = cfg.value("dim", 1);
    int n = cfg.value("n", dim == 2 ? 63 : 255);
    std::string domain = cfg.value("domain", dim == 2 ? "square" : "interval");
    double p = cfg.value("p", 2.0);
    double tol = cfg.value("tol", 1e-10);

    rispace::Grid grid = [&] {
      if (domain == "interval") return rispace::Grid::interval(n);
      if (domain == "square") return rispace::Grid::square(n);
      if (domain == "disk")
        return rispace::Grid::disk(n, cfg.value("radius", 0.45));
      throw rispace::spec_error("unknown domain '" + domain + "'");
    }();

    rispace::PotentialSpec pot;
    if (cfg.contains("potential"))
      pot = cfg.at("potential").get<rispace::PotentialSpec>();

    rispace::GridFunction f = [&] {
      if (!cfg.contains("f")) return rispace::GridFunction::constant(grid, 1.0);
      const nlohmann::json& fj = cfg.at("f");
      std::string kind = fj.value("kind", "const");
      if (kind == "const")
        return rispace::GridFunction::constant(grid, fj.value("value", 1.0));
      if (kind == "descriptor")
        return fj.at("descriptor").get<rispace::DataDescriptor>().realize(grid);
      if (kind == "values") {
        rispace::GridFunction g = rispace::GridFunction::zeros(grid);
        auto vals = fj.at("values").get<std::vector<double>>();
        if (vals.size() != g.values.size())
          throw rispace::spec_error("values array does not match the grid");
        g.values = std::move(vals);
        g.enforce_mask();
        return g;
      }
      throw rispace::spec_error("unknown data kind '" + kind + "'");
    }();

    rispace::SolveResult res = rispace::solve_weak_detailed(grid, p, pot, f, tol);
    rispace::GradientField grad = rispace::gradient_of(res.u);

    // Value at the cell nearest the domain center.
    int ic = (grid.n - 1) / 2;
    double center = grid.dimension == 2
                        ? (grid.in(ic, ic) ? res.u.at(ic, ic) : 0.0)
                        : res.u.at(ic);

    nlohmann::json out = {{"converged", res.stats.converged},
                          {"iterations", res.stats.iterations},
                          {"residual", res.stats.residual},
                          {"energy", res.stats.energy},
                          {"max_abs", res.u.max_abs()},
                          {"center_value", center},
                          {"gradient_sup", grad.sup_all_sites},
                          {"grid", grid},
                          {"values", res.u.values}};
    if (cfg.contains("gradient_norm_space"))
      out["gradient_norm"] = rispace::space_norm(
          grad.magnitude_view(),
          cfg.at("gradient_norm_space").get<rispace::SpaceSpec>());
    if (cfg.contains("solution_norm_space"))
      out["solution_norm"] = rispace::space_norm(
          res.u.cell_view(),
          cfg.at("solution_norm_space").get<rispace::SpaceSpec>());
    *out_json = dup_string(out.dump());
  });
}

// ---------------------------------------------------------------------------
// Experiment harness

ri_status ri_experiment_run(const char* config_json, char** out_json) {
  if (!config_json || !out_json) return fail(RI_ERR_INVALID_ARG, "null argument");
  *out_json = nullptr;
  return guarded([&] {
    rispace::ExperimentConfig cfg =
        parse(config_json, "experiment config").get<rispace::ExperimentConfig>();
    rispace::ExperimentResult res = rispace::run_experiment(cfg);
    *out_json = dup_string(res.to_json_payload().dump());
  });
}

ri_status ri_experiment_csv(const char* config_json, int with_seconds,
                            char** out_csv) {
  if (!config_json || !out_csv) return fail(RI_ERR_INVALID_ARG, "null argument");
  *out_csv = nullptr;
  return guarded([&] {
    rispace::ExperimentConfig cfg =
        parse(config_json, "experiment config").get<rispace::ExperimentConfig>();
    rispace::ExperimentResult res = rispace::run_experiment(cfg);
    *out_csv = dup_string(res.csv(with_seconds != 0));
  });
}

}  // extern "C"
