#pragma once

// Discrete weak solutions of -div(|∇u|^{p-2}∇u) + V(x;u) = f with homogeneous
// Dirichlet data on masked interior grids over (0,1)^d, d in {1,2}, plus the
// discrete monotonicity machinery the regularity estimates rest on.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spaces.hpp"

namespace rispace {

// Cells sit at the interior nodes x_i = (i+1)h, h = 1/(n+1), of a classical
// finite-difference layout; the Dirichlet ring of zeros sits exactly on the
// domain faces. Interior cell measures are normalized to total measure 1.
struct Grid {
  int dimension = 1;
  int n = 1;        // cells per axis
  double h = 0.5;   // 1/(n+1)
  std::vector<std::uint8_t> mask;  // size cells(), 1 = interior
  int interior_count = 0;
  double cell_measure = 1.0;       // 1 / interior_count

  static Grid interval(int n);
  static Grid square(int n);
  static Grid disk(int n, double radius = 0.45);

  int cells() const { return dimension == 1 ? n : n * n; }
  int idx(int i, int j = 0) const { return j * n + i; }
  bool in(int i, int j = 0) const {
    if (i < 0 || i >= n) return false;
    if (dimension == 2 && (j < 0 || j >= n)) return false;
    return mask[idx(i, j)] != 0;
  }
  double xi(int i) const { return (i + 1) * h; }
  void finalize();        // recompute counts/measure from the mask
  void validate() const;  // nonempty, mask-connected interior
};

void to_json(nlohmann::json& j, const Grid& g);
void from_json(const nlohmann::json& j, Grid& g);

struct GridFunction {
  Grid grid;
  std::vector<double> values;  // size grid.cells(); zero at masked-out cells

  static GridFunction zeros(const Grid& g);
  static GridFunction constant(const Grid& g, double c);

  double at(int i, int j = 0) const {
    return grid.in(i, j) ? values[grid.idx(i, j)] : 0.0;
  }
  void set(int i, int j, double v) {
    if (grid.in(i, j)) values[grid.idx(i, j)] = v;
  }
  void enforce_mask();
  double max_abs() const;
  SimpleFunction cell_view() const;  // (value, cell measure) over interior cells
};

void to_json(nlohmann::json& j, const GridFunction& u);
void from_json(const nlohmann::json& j, GridFunction& u);

// V(x, sigma) = c(x) sign(sigma) |sigma|^{m1} with c >= 0 bounded:
// continuous, nondecreasing in sigma, V(x,0) = 0.
struct PotentialSpec {
  std::string kind = "zero";  // zero | const | bump
  double c0 = 0.0;
  double m1 = 1.0;
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.25;

  double coeff(const Grid& g, int i, int j = 0) const;
  double V(double c, double sigma) const;
  double W(double c, double sigma) const;       // primitive of V in sigma
  double Vprime(double c, double sigma, double floor_scale) const;
  bool is_zero() const { return kind == "zero" || c0 == 0.0; }
  // growth window: m1 >= p-1 always; m1 < (p-1)(1 + 1/(n-p)) when p < n
  void validate(double p, int n) const;
};

void to_json(nlohmann::json& j, const PotentialSpec& v);
void from_json(const nlohmann::json& j, PotentialSpec& v);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
  std::vector<double> energy_history;  // nonincreasing along damped iterates
};

void to_json(nlohmann::json& j, const SolveStats& s);

struct SolveResult {
  GridFunction u;
  SolveStats stats;
};

// T_k(sigma) = (|k+sigma| - |k-sigma|)/2, the clamp of sigma to [-k, k].
double truncate(double sigma, double k);
GridFunction truncate(const GridFunction& u, double k);

GridFunction solve_weak(const Grid& grid, double p, const PotentialSpec& V,
                        const GridFunction& f, double tol);
SolveResult solve_weak_detailed(const Grid& grid, double p, const PotentialSpec& V,
                                const GridFunction& f, double tol);

// Forward-difference gradient. The per-cell vectors (and the rearrangeable
// |∇u| view of total measure 1) cover the interior cells; sup_all_sites also
// sees the ghost sites that carry the lower-wall Dirichlet links.
struct GradientField {
  Grid grid;
  std::vector<std::array<double, 2>> vec;  // per cell; zero off the interior
  double sup_all_sites = 0.0;

  SimpleFunction magnitude_view() const;
  SimpleFunction difference_view(const GradientField& other) const;
};

GradientField gradient_of(const GridFunction& u);
GradientField solution_map_gradient(const Grid& grid, double p, const PotentialSpec& V,
                                    const GridFunction& f, double tol);
double gradient_norm(const GradientField& g, const SpaceSpec& spec);

// Discrete strong-coercivity chain for p >= 2, with c_p = 2^{2-p}:
//   c_p Σ |∇(u1-u2)|^p m  <=  Σ (f1-f2)(u1-u2) m,
// and the potential pairing Σ (V(x,u2)-V(x,u1))(u1-u2) m <= 0.
struct MonotonicityReport {
  double coercive_lhs = 0.0;
  double pairing_rhs = 0.0;
  double coercivity_slack = 0.0;  // rhs - lhs
  double v_pairing = 0.0;
  bool pass = false;
};

MonotonicityReport monotonicity_check(const GridFunction& u1, const GridFunction& u2,
                                      const GridFunction& f1, const GridFunction& f2,
                                      double p, const PotentialSpec& V,
                                      double residual_tol = 1e-6);

// Exponent bookkeeping shared by the regularity-theorem harness.
double n_prime(int n);                    // n/(n-1)
double p_star(double p, int n);           // np/(n-p), requires p < n
double p_star_conj(double p, int n);      // np/(np-n+p) = (p*)', defined for all p > 1
double h3_exponent_cap(double p, int n);  // (p-1)(1 + 1/(n-p)) for p < n

}  // namespace rispace
