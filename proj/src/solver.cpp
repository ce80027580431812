#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>

#include "common.hpp"

namespace rispace {

namespace {

constexpr double kEpsReg = 1e-10;   // gradient regularization in the energy
constexpr int kMaxOuter = 100000;   // outer iteration cap

// Run-length encode a 0/1 mask as [[value, count], ...].
nlohmann::json mask_to_rle(const std::vector<std::uint8_t>& mask) {
  nlohmann::json rle = nlohmann::json::array();
  std::size_t i = 0;
  while (i < mask.size()) {
    std::size_t j = i;
    while (j < mask.size() && mask[j] == mask[i]) ++j;
    rle.push_back({static_cast<int>(mask[i]), j - i});
    i = j;
  }
  return rle;
}

std::vector<std::uint8_t> mask_from_rle(const nlohmann::json& rle) {
  std::vector<std::uint8_t> mask;
  for (const auto& run : rle) {
    int value = run.at(0).get<int>();
    std::size_t count = run.at(1).get<std::size_t>();
    if (value != 0 && value != 1) throw spec_error("mask runs must hold 0 or 1");
    mask.insert(mask.end(), count, static_cast<std::uint8_t>(value));
  }
  return mask;
}

// Everything the iteration needs to sweep the forward-difference sites.
// Sites live at (i, j) with i, j in {-1, ..., n-1}; the ghost row/column at
// -1 carries the links into the lower Dirichlet walls, so each link between a
// cell and a neighbor (or the boundary) is visited exactly once.
struct Stencil {
  const Grid& g;
  double p, eps;
  int n, jlo, jhi;

  Stencil(const Grid& grid, double pp, double ee)
      : g(grid), p(pp), eps(ee), n(grid.n),
        jlo(grid.dimension == 2 ? -1 : 0),
        jhi(grid.dimension == 2 ? grid.n - 1 : 0) {}

  double val(const std::vector<double>& v, int i, int j) const {
    return g.in(i, j) ? v[g.idx(i, j)] : 0.0;
  }
  double psi(double z) const {
    return (std::pow(z + eps, 0.5 * p) - std::pow(eps, 0.5 * p)) / p;
  }
  double acoef(double z) const { return std::pow(z + eps, 0.5 * p - 1.0); }

  int site_count() const {
    int per = n + 1;
    return g.dimension == 2 ? per * per : per;
  }
  int site(int i, int j) const {
    return g.dimension == 2 ? (j + 1) * (n + 1) + (i + 1) : i + 1;
  }

  // Σ_sites psi(|∇u|²); optionally writes ∂(that sum)/∂u into grad (plain,
  // per-measure form) and the frozen coefficients a(|∇u|²) into acoefs.
  double sweep(const std::vector<double>& u, std::vector<double>* grad,
               std::vector<double>* acoefs) const {
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    double total = 0.0;
    const double invh = 1.0 / g.h;
    for (int j = jlo; j <= jhi; ++j) {
      for (int i = -1; i < n; ++i) {
        double uc = val(u, i, j);
        double gx = (val(u, i + 1, j) - uc) * invh;
        double gy = g.dimension == 2 ? (val(u, i, j + 1) - uc) * invh : 0.0;
        double z = gx * gx + gy * gy;
        double a = acoef(z);
        if (acoefs) (*acoefs)[site(i, j)] = a;
        if (z > 0.0) total += psi(z);
        if (grad && z > 0.0) {
          double tx = a * gx * invh;
          if (g.in(i + 1, j)) (*grad)[g.idx(i + 1, j)] += tx;
          if (g.in(i, j)) (*grad)[g.idx(i, j)] -= tx;
          if (g.dimension == 2) {
            double ty = a * gy * invh;
            if (g.in(i, j + 1)) (*grad)[g.idx(i, j + 1)] += ty;
            if (g.in(i, j)) (*grad)[g.idx(i, j)] -= ty;
          }
        }
      }
    }
    return total;
  }

  // out = A v for the frozen-coefficient quadratic model:
  // A = D^T diag(a) D / h² + diag(vp).
  void apply(const std::vector<double>& acoefs, const std::vector<double>& vp,
             const std::vector<double>& v, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const double invh = 1.0 / g.h;
    for (int j = jlo; j <= jhi; ++j) {
      for (int i = -1; i < n; ++i) {
        double a = acoefs[site(i, j)];
        double vc = val(v, i, j);
        double gvx = (val(v, i + 1, j) - vc) * invh;
        double tx = a * gvx * invh;
        if (g.in(i + 1, j)) out[g.idx(i + 1, j)] += tx;
        if (g.in(i, j)) out[g.idx(i, j)] -= tx;
        if (g.dimension == 2) {
          double gvy = (val(v, i, j + 1) - vc) * invh;
          double ty = a * gvy * invh;
          if (g.in(i, j + 1)) out[g.idx(i, j + 1)] += ty;
          if (g.in(i, j)) out[g.idx(i, j)] -= ty;
        }
      }
    }
    for (std::size_t c = 0; c < v.size(); ++c) out[c] += vp[c] * v[c];
  }

  std::vector<double> jacobi_diag(const std::vector<double>& acoefs,
                                  const std::vector<double>& vp) const {
    std::vector<double> diag(g.cells(), 0.0);
    const double invh2 = 1.0 / (g.h * g.h);
    int comps = g.dimension;
    for (int j = jlo; j <= jhi; ++j) {
      for (int i = -1; i < n; ++i) {
        double a = acoefs[site(i, j)] * invh2;
        if (g.in(i + 1, j)) diag[g.idx(i + 1, j)] += a;
        if (g.in(i, j)) diag[g.idx(i, j)] += a * comps;
        if (g.dimension == 2 && g.in(i, j + 1)) diag[g.idx(i, j + 1)] += a;
      }
    }
    for (std::size_t c = 0; c < diag.size(); ++c) {
      diag[c] += vp[c];
      if (diag[c] <= 0.0) diag[c] = 1.0;  // masked-out cells carry no DOF
    }
    return diag;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

void Grid::finalize() {
  if (n < 1) throw spec_error("grid needs at least one cell per axis");
  if (dimension != 1 && dimension != 2) throw spec_error("grid dimension must be 1 or 2");
  h = 1.0 / (n + 1);
  if (mask.empty()) mask.assign(cells(), 1);
  if (static_cast<int>(mask.size()) != cells())
    throw spec_error("grid mask size does not match the cell count");
  interior_count = 0;
  for (auto m : mask) interior_count += (m != 0);
  if (interior_count == 0) throw spec_error("grid mask leaves no interior cells");
  cell_measure = 1.0 / interior_count;
}

void Grid::validate() const {
  if (n < 1 || (dimension != 1 && dimension != 2) ||
      static_cast<int>(mask.size()) != cells() || interior_count <= 0)
    throw spec_error("grid is not finalized");
  // Flood fill: the interior must form one face-connected component.
  std::vector<std::uint8_t> seen(cells(), 0);
  int start = -1;
  for (int c = 0; c < cells(); ++c)
    if (mask[c]) { start = c; break; }
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  int reached = 0;
  while (!q.empty()) {
    int c = q.front();
    q.pop();
    ++reached;
    int i = c % n, j = c / n;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    int dirs = dimension == 2 ? 4 : 2;
    for (int d = 0; d < dirs; ++d) {
      int ii = i + di[d], jj = j + dj[d];
      if (ii < 0 || ii >= n) continue;
      if (dimension == 2 && (jj < 0 || jj >= n)) continue;
      int cc = idx(ii, dimension == 2 ? jj : 0);
      if (mask[cc] && !seen[cc]) {
        seen[cc] = 1;
        q.push(cc);
      }
    }
  }
  if (reached != interior_count)
    throw spec_error("grid interior is not connected");
}

Grid Grid::interval(int n) {
  Grid g;
  g.dimension = 1;
  g.n = n;
  g.finalize();
  g.validate();
  return g;
}

Grid Grid::square(int n) {
  Grid g;
  g.dimension = 2;
  g.n = n;
  g.finalize();
  g.validate();
  return g;
}

Grid Grid::disk(int n, double radius) {
  Grid g;
  g.dimension = 2;
  g.n = n;
  g.h = 1.0 / (n + 1);
  g.mask.assign(static_cast<std::size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double dx = g.xi(i) - 0.5, dy = g.xi(j) - 0.5;
      if (dx * dx + dy * dy <= radius * radius) g.mask[g.idx(i, j)] = 1;
    }
  }
  g.finalize();
  g.validate();
  return g;
}

void to_json(nlohmann::json& j, const Grid& g) {
  j = nlohmann::json{{"dimension", g.dimension},
                     {"cells_per_axis", g.n},
                     {"h", g.h},
                     {"mask_rle", mask_to_rle(g.mask)}};
}

void from_json(const nlohmann::json& j, Grid& g) {
  g = Grid{};
  g.dimension = j.at("dimension").get<int>();
  g.n = j.at("cells_per_axis").get<int>();
  if (j.contains("mask_rle")) g.mask = mask_from_rle(j.at("mask_rle"));
  g.finalize();
  g.validate();
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction GridFunction::zeros(const Grid& g) {
  GridFunction u;
  u.grid = g;
  u.values.assign(g.cells(), 0.0);
  return u;
}

GridFunction GridFunction::constant(const Grid& g, double c) {
  GridFunction u = zeros(g);
  for (int i = 0; i < g.cells(); ++i)
    if (g.mask[i]) u.values[i] = c;
  return u;
}

void GridFunction::enforce_mask() {
  if (static_cast<int>(values.size()) != grid.cells())
    throw spec_error("grid function value count does not match the grid");
  for (int i = 0; i < grid.cells(); ++i)
    if (!grid.mask[i]) values[i] = 0.0;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SimpleFunction GridFunction::cell_view() const {
  std::vector<Piece> pieces;
  pieces.reserve(grid.interior_count);
  for (int i = 0; i < grid.cells(); ++i)
    if (grid.mask[i]) pieces.push_back({values[i], grid.cell_measure});
  return SimpleFunction(std::move(pieces));
}

void to_json(nlohmann::json& j, const GridFunction& u) {
  j = nlohmann::json{{"grid", u.grid}, {"values", u.values}};
}

void from_json(const nlohmann::json& j, GridFunction& u) {
  u.grid = j.at("grid").get<Grid>();
  u.values = j.at("values").get<std::vector<double>>();
  u.enforce_mask();
}

// ---------------------------------------------------------------------------
// PotentialSpec

double PotentialSpec::coeff(const Grid& g, int i, int j) const {
  if (is_zero()) return 0.0;
  if (kind == "const") return c0;
  double dx = g.xi(i) - center[0];
  double d2 = dx * dx;
  if (g.dimension == 2) {
    double dy = g.xi(j) - center[1];
    d2 += dy * dy;
  }
  return c0 * std::exp(-d2 / (width * width));
}

double PotentialSpec::V(double c, double sigma) const {
  if (c == 0.0 || sigma == 0.0) return 0.0;
  double s = sigma > 0.0 ? 1.0 : -1.0;
  return c * s * std::pow(std::abs(sigma), m1);
}

double PotentialSpec::W(double c, double sigma) const {
  if (c == 0.0 || sigma == 0.0) return 0.0;
  return c * std::pow(std::abs(sigma), m1 + 1.0) / (m1 + 1.0);
}

double PotentialSpec::Vprime(double c, double sigma, double floor_scale) const {
  if (c == 0.0) return 0.0;
  double s = std::max(std::abs(sigma), floor_scale);
  return c * m1 * std::pow(s, m1 - 1.0);
}

void PotentialSpec::validate(double p, int n) const {
  if (kind != "zero" && kind != "const" && kind != "bump")
    throw spec_error("unknown potential kind '" + kind + "'");
  if (!(c0 >= 0.0) || !std::isfinite(c0))
    throw spec_error("potential coefficient must be finite and nonnegative");
  if (is_zero()) return;
  if (kind == "bump" && !(width > 0.0)) throw spec_error("bump width must be positive");
  if (!std::isfinite(m1) || m1 < p - 1.0 - 1e-12)
    throw spec_error("potential growth exponent must be at least p-1");
  if (p < n) {
    double cap = (p - 1.0) * (1.0 + 1.0 / (n - p));
    if (!(m1 < cap - 1e-12))
      throw spec_error("potential growth exponent exceeds the admissible window");
  }
}

void to_json(nlohmann::json& j, const PotentialSpec& v) {
  j = nlohmann::json{{"kind", v.kind}, {"c0", v.c0}, {"m1", v.m1},
                     {"center", v.center}, {"width", v.width}};
}

void from_json(const nlohmann::json& j, PotentialSpec& v) {
  v = PotentialSpec{};
  if (j.contains("kind")) j.at("kind").get_to(v.kind);
  if (j.contains("c0")) j.at("c0").get_to(v.c0);
  if (j.contains("m1")) j.at("m1").get_to(v.m1);
  if (j.contains("center")) j.at("center").get_to(v.center);
  if (j.contains("width")) j.at("width").get_to(v.width);
}

void to_json(nlohmann::json& j, const SolveStats& s) {
  j = nlohmann::json{{"iterations", s.iterations},
                     {"residual", s.residual},
                     {"energy", s.energy},
                     {"converged", s.converged},
                     {"residual_history", s.residual_history},
                     {"energy_history", s.energy_history}};
}

// ---------------------------------------------------------------------------
// Truncation

double truncate(double sigma, double k) {
  if (!(k > 0.0)) throw spec_error("truncation level must be positive");
  return (std::abs(k + sigma) - std::abs(k - sigma)) / 2.0;
}

GridFunction truncate(const GridFunction& u, double k) {
  GridFunction v = u;
  for (double& x : v.values) x = truncate(x, k);
  return v;
}

// ---------------------------------------------------------------------------
// Solver

SolveResult solve_weak_detailed(const Grid& grid, double p, const PotentialSpec& Vs,
                                const GridFunction& f, double tol) {
  if (!(p > 1.0)) throw spec_error("the weak problem needs p > 1");
  if (!(tol > 0.0)) throw spec_error("solver tolerance must be positive");
  grid.validate();
  Vs.validate(p, grid.dimension);
  if (f.grid.dimension != grid.dimension || f.grid.n != grid.n || f.grid.mask != grid.mask)
    throw spec_error("load and grid are incompatible");

  const int nc = grid.cells();
  const double m = grid.cell_measure;
  Stencil st(grid, p, kEpsReg);

  std::vector<double> coef(nc, 0.0);
  for (int j = 0; j < (grid.dimension == 2 ? grid.n : 1); ++j)
    for (int i = 0; i < grid.n; ++i)
      if (grid.in(i, j)) coef[grid.idx(i, j)] = Vs.coeff(grid, i, j);

  double fnorm = 0.0;
  for (int c = 0; c < nc; ++c)
    if (grid.mask[c]) fnorm += f.values[c] * f.values[c] * m;
  fnorm = std::sqrt(fnorm);

  std::vector<double> u(nc, 0.0), grad(nc, 0.0), r(nc, 0.0);
  std::vector<double> acoefs(st.site_count(), 0.0), vp(nc, 0.0);

  // Per-measure objective: Σ_sites psi + Σ_cells (W - f u).
  auto objective = [&](const std::vector<double>& w) {
    double e = st.sweep(w, nullptr, nullptr);
    for (int c = 0; c < nc; ++c)
      if (grid.mask[c]) e += Vs.W(coef[c], w[c]) - f.values[c] * w[c];
    return e;
  };

  std::vector<double> scratch(nc, 0.0);
  auto residual_norm = [&](const std::vector<double>& w) {
    st.sweep(w, &scratch, nullptr);
    double s2 = 0.0;
    for (int c = 0; c < nc; ++c) {
      if (!grid.mask[c]) continue;
      double rc = scratch[c] + Vs.V(coef[c], w[c]) - f.values[c];
      s2 += rc * rc * m;
    }
    return std::sqrt(s2);
  };

  SolveStats stats;
  double res = 0.0;
  bool stalled = false;

  for (int iter = 0; iter < kMaxOuter; ++iter) {
    st.sweep(u, &grad, &acoefs);
    for (int c = 0; c < nc; ++c)
      r[c] = grid.mask[c] ? grad[c] + Vs.V(coef[c], u[c]) - f.values[c] : 0.0;
    res = 0.0;
    for (int c = 0; c < nc; ++c) res += r[c] * r[c] * m;
    res = std::sqrt(res);
    stats.iterations = iter;
    stats.residual_history.push_back(res);
    stats.energy_history.push_back(m * objective(u));
    if (res <= tol * (1.0 + fnorm)) {
      stats.converged = true;
      break;
    }

    // Frozen-coefficient quadratic model. The first step for p != 2 borrows
    // unit coefficients so the initial direction has the Laplace shape; the
    // line search then fixes the scale.
    if (iter == 0 && p != 2.0) std::fill(acoefs.begin(), acoefs.end(), 1.0);
    double floor_scale = 1e-8 * (1.0 + *std::max_element(u.begin(), u.end(),
        [](double a, double b) { return std::abs(a) < std::abs(b); }));
    for (int c = 0; c < nc; ++c)
      vp[c] = grid.mask[c] ? Vs.Vprime(coef[c], u[c], floor_scale) : 0.0;
    std::vector<double> diag = st.jacobi_diag(acoefs, vp);

    // Preconditioned CG on A delta = -r.
    std::vector<double> delta(nc, 0.0), rr(nc), z(nc), pv(nc), q(nc);
    for (int c = 0; c < nc; ++c) rr[c] = -r[c];
    double bnorm = std::sqrt(dot(rr, rr));
    double eta = std::min(0.1, std::sqrt(res / (1.0 + fnorm)));
    int cg_cap = 4 * grid.interior_count + 200;
    if (bnorm > 0.0) {
      for (int c = 0; c < nc; ++c) z[c] = rr[c] / diag[c];
      pv = z;
      double rz = dot(rr, z);
      for (int k = 0; k < cg_cap; ++k) {
        st.apply(acoefs, vp, pv, q);
        double pq = dot(pv, q);
        if (pq <= 0.0) break;
        double alpha = rz / pq;
        for (int c = 0; c < nc; ++c) {
          delta[c] += alpha * pv[c];
          rr[c] -= alpha * q[c];
        }
        if (std::sqrt(dot(rr, rr)) <= eta * bnorm) break;
        for (int c = 0; c < nc; ++c) z[c] = rr[c] / diag[c];
        double rz2 = dot(rr, z);
        double beta = rz2 / rz;
        rz = rz2;
        for (int c = 0; c < nc; ++c) pv[c] = z[c] + beta * pv[c];
      }
    }

    // Armijo backtracking on the objective.
    double j0 = objective(u);
    double slope = dot(r, delta);
    if (slope >= 0.0) {  // CG produced no descent direction; give up
      stalled = true;
      break;
    }
    // Sufficient decrease, with a fallback for the roundoff regime: near the
    // minimizer the true decrement of the objective drops below evaluation
    // precision, so a step is also accepted when it keeps the objective
    // within roundoff noise AND strictly shrinks the nonlinear residual.
    // (The residual condition is what rejects the undamped two-cycle the
    // frozen-coefficient model falls into for p > 2.)
    double noise = 1e-14 * (1.0 + std::abs(j0));
    double s = 1.0;
    std::vector<double> trial(nc);
    bool accepted = false;
    while (s >= 1e-16) {
      for (int c = 0; c < nc; ++c) trial[c] = u[c] + s * delta[c];
      double jt = objective(trial);
      if (jt <= j0 + 1e-4 * s * slope) {
        accepted = true;
        break;
      }
      if (jt <= j0 + noise && residual_norm(trial) <= (1.0 - 1e-3) * res) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    u = trial;
  }

  if (!stats.converged) {
    std::string why = stalled ? "line search stalled" : "iteration cap reached";
    throw convergence_failure("weak solver did not converge (" + why + ")", res);
  }

  stats.residual = res;
  stats.energy = m * objective(u);

  SolveResult out;
  out.u = GridFunction::zeros(grid);
  out.u.values = std::move(u);
  out.stats = std::move(stats);
  return out;
}

GridFunction solve_weak(const Grid& grid, double p, const PotentialSpec& V,
                        const GridFunction& f, double tol) {
  return solve_weak_detailed(grid, p, V, f, tol).u;
}

// ---------------------------------------------------------------------------
// Gradients

GradientField gradient_of(const GridFunction& u) {
  const Grid& g = u.grid;
  GradientField out;
  out.grid = g;
  out.vec.assign(g.cells(), {0.0, 0.0});
  const double invh = 1.0 / g.h;
  int jhi = g.dimension == 2 ? g.n - 1 : 0;
  double sup = 0.0;
  for (int j = g.dimension == 2 ? -1 : 0; j <= jhi; ++j) {
    for (int i = -1; i < g.n; ++i) {
      double uc = u.at(i, j);
      double gx = (u.at(i + 1, j) - uc) * invh;
      double gy = g.dimension == 2 ? (u.at(i, j + 1) - uc) * invh : 0.0;
      double mag = std::sqrt(gx * gx + gy * gy);
      sup = std::max(sup, mag);
      if (g.in(i, j)) out.vec[g.idx(i, j)] = {gx, gy};
    }
  }
  out.sup_all_sites = sup;
  return out;
}

SimpleFunction GradientField::magnitude_view() const {
  std::vector<Piece> pieces;
  pieces.reserve(grid.interior_count);
  for (int c = 0; c < grid.cells(); ++c)
    if (grid.mask[c])
      pieces.push_back({std::hypot(vec[c][0], vec[c][1]), grid.cell_measure});
  return SimpleFunction(std::move(pieces));
}

SimpleFunction GradientField::difference_view(const GradientField& other) const {
  if (grid.dimension != other.grid.dimension || grid.n != other.grid.n ||
      grid.mask != other.grid.mask)
    throw spec_error("gradient fields live on different grids");
  std::vector<Piece> pieces;
  pieces.reserve(grid.interior_count);
  for (int c = 0; c < grid.cells(); ++c)
    if (grid.mask[c])
      pieces.push_back({std::hypot(vec[c][0] - other.vec[c][0], vec[c][1] - other.vec[c][1]),
                        grid.cell_measure});
  return SimpleFunction(std::move(pieces));
}

GradientField solution_map_gradient(const Grid& grid, double p, const PotentialSpec& V,
                                    const GridFunction& f, double tol) {
  return gradient_of(solve_weak(grid, p, V, f, tol));
}

double gradient_norm(const GradientField& g, const SpaceSpec& spec) {
  return space_norm(g.magnitude_view(), spec);
}

// ---------------------------------------------------------------------------
// Monotonicity

MonotonicityReport monotonicity_check(const GridFunction& u1, const GridFunction& u2,
                                      const GridFunction& f1, const GridFunction& f2,
                                      double p, const PotentialSpec& Vs,
                                      double residual_tol) {
  if (!(p >= 2.0)) throw spec_error("the coercivity chain needs p >= 2");
  const Grid& g = u1.grid;
  for (const GridFunction* gf : {&u2, &f1, &f2})
    if (gf->grid.dimension != g.dimension || gf->grid.n != g.n || gf->grid.mask != g.mask)
      throw spec_error("monotonicity inputs live on different grids");

  const int nc = g.cells();
  const double m = g.cell_measure;
  Stencil st(g, p, kEpsReg);

  std::vector<double> coef(nc, 0.0);
  for (int j = 0; j < (g.dimension == 2 ? g.n : 1); ++j)
    for (int i = 0; i < g.n; ++i)
      if (g.in(i, j)) coef[g.idx(i, j)] = Vs.coeff(g, i, j);

  // Refuse unconverged inputs: both must satisfy their own weak equations.
  std::vector<double> grad(nc, 0.0);
  auto residual_of = [&](const GridFunction& u, const GridFunction& f) {
    st.sweep(u.values, &grad, nullptr);
    double res = 0.0, fn = 0.0;
    for (int c = 0; c < nc; ++c) {
      if (!g.mask[c]) continue;
      double r = grad[c] + Vs.V(coef[c], u.values[c]) - f.values[c];
      res += r * r * m;
      fn += f.values[c] * f.values[c] * m;
    }
    return std::sqrt(res) / (1.0 + std::sqrt(fn));
  };
  if (residual_of(u1, f1) > residual_tol || residual_of(u2, f2) > residual_tol)
    throw spec_error("monotonicity check refused: inputs do not solve their weak equations");

  // c_p Σ_sites |∇(u1-u2)|^p m over every site, ghost links included.
  std::vector<double> w(nc);
  for (int c = 0; c < nc; ++c) w[c] = u1.values[c] - u2.values[c];
  double lhs = 0.0;
  const double invh = 1.0 / g.h;
  int jlo = g.dimension == 2 ? -1 : 0;
  int jhi = g.dimension == 2 ? g.n - 1 : 0;
  for (int j = jlo; j <= jhi; ++j) {
    for (int i = -1; i < g.n; ++i) {
      double wc = st.val(w, i, j);
      double gx = (st.val(w, i + 1, j) - wc) * invh;
      double gy = g.dimension == 2 ? (st.val(w, i, j + 1) - wc) * invh : 0.0;
      lhs += std::pow(gx * gx + gy * gy, 0.5 * p) * m;
    }
  }
  lhs *= std::pow(2.0, 2.0 - p);

  MonotonicityReport rep;
  rep.coercive_lhs = lhs;
  double vscale = 0.0;
  for (int c = 0; c < nc; ++c) {
    if (!g.mask[c]) continue;
    rep.pairing_rhs += (f1.values[c] - f2.values[c]) * w[c] * m;
    double v1 = Vs.V(coef[c], u1.values[c]);
    double v2 = Vs.V(coef[c], u2.values[c]);
    rep.v_pairing += (v2 - v1) * w[c] * m;
    vscale += (std::abs(v1) + std::abs(v2)) * std::abs(w[c]) * m;
  }
  rep.coercivity_slack = rep.pairing_rhs - rep.coercive_lhs;
  double scale = std::max(1.0, std::abs(rep.pairing_rhs));
  rep.pass = rep.coercivity_slack >= -1e-6 * scale &&
             rep.v_pairing <= 1e-10 * (1.0 + vscale);
  return rep;
}

// ---------------------------------------------------------------------------
// Exponent bookkeeping

double n_prime(int n) {
  if (n < 1) throw spec_error("dimension must be positive");
  if (n == 1) return kInf;
  return static_cast<double>(n) / (n - 1);
}

double p_star(double p, int n) {
  if (!(p > 0.0) || n < 1) throw spec_error("invalid exponent arguments");
  if (!(p < n)) throw spec_error("the Sobolev exponent needs p < n");
  return n * p / (n - p);
}

double p_star_conj(double p, int n) {
  if (!(p >= 1.0) || n < 1) throw spec_error("invalid exponent arguments");
  return n * p / (n * p - n + p);
}

double h3_exponent_cap(double p, int n) {
  if (!(p > 1.0) || !(p < n)) throw spec_error("the growth window needs 1 < p < n");
  return (p - 1.0) * (1.0 + 1.0 / (n - p));
}

}  // namespace rispace
