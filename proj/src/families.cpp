#include "families.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace rispace {

SimpleFunction random_simple(std::mt19937_64& rng, int max_pieces) {
  std::uniform_int_distribution<int> count_d(1, std::max(1, max_pieces));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> logval(0.0, 1.2);
  int count = count_d(rng);

  std::vector<double> weights(count);
  for (double& w : weights) w = -std::log(1.0 - unif(rng));
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  double total = 0.3 + 0.7 * unif(rng);  // leave room for an explicit zero tail

  std::vector<Piece> pieces;
  pieces.reserve(count);
  double prev = 1.0;
  for (int i = 0; i < count; ++i) {
    double v = std::exp(logval(rng));
    if (i > 0 && unif(rng) < 0.15) v = prev;  // ties stress the merge logic
    if (unif(rng) < 0.2) v = -v;              // rearrangement must take |f|
    prev = std::abs(v);
    pieces.push_back({v, weights[i] / wsum * total});
  }
  return SimpleFunction(std::move(pieces));
}

std::vector<SimpleFunction> random_simple_family(std::uint64_t seed, int count,
                                                 int max_pieces) {
  std::mt19937_64 rng(seed);
  std::vector<SimpleFunction> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(random_simple(rng, max_pieces));
  return out;
}

SimpleFunction power_log_profile(double gamma, double lambda, int pieces) {
  if (pieces < 2) throw spec_error("profile needs at least two dyadic pieces");
  auto phi = [&](double t) {
    return std::pow(t, -gamma) * std::pow(1.0 - std::log(t), lambda);
  };
  std::vector<Piece> out;
  out.reserve(pieces);
  double lo = std::ldexp(1.0, -(pieces - 1));
  out.push_back({phi(lo / 2.0), lo});  // capped head piece on (0, 2^{1-pieces}]
  for (int i = pieces - 2; i >= 0; --i) {
    double a = std::ldexp(1.0, -(i + 1)), b = std::ldexp(1.0, -i);
    out.push_back({phi(std::sqrt(a * b)), b - a});
  }
  return SimpleFunction(std::move(out));
}

std::vector<SimpleFunction> power_log_family(double gamma_max, int count) {
  if (!(gamma_max > 0.0)) throw spec_error("family needs a positive tail boundary");
  static const double twists[4] = {0.0, 0.5, -0.5, 1.0};
  std::vector<SimpleFunction> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double frac = count == 1 ? 0.5 : 0.15 + 0.8 * i / (count - 1.0);
    out.push_back(power_log_profile(frac * gamma_max, twists[i % 4]));
  }
  return out;
}

GridFunction DataDescriptor::realize(const Grid& g) const {
  if (spikes.empty() && bumps.empty()) return GridFunction::constant(g, 1.0);
  GridFunction f = GridFunction::zeros(g);
  int jmax = g.dimension == 2 ? g.n : 1;
  for (int j = 0; j < jmax; ++j) {
    for (int i = 0; i < g.n; ++i) {
      if (!g.in(i, j)) continue;
      double x = g.xi(i), y = g.dimension == 2 ? g.xi(j) : 0.0;
      double v = 0.0;
      for (const SpikeSpec& s : spikes) {
        double dx = x - s.x0[0];
        double dy = g.dimension == 2 ? y - s.x0[1] : 0.0;
        double rr = std::sqrt(dx * dx + dy * dy);
        double cap = std::pow(cap_radius, -s.gamma);
        v += s.amp * (rr <= cap_radius ? cap : std::pow(rr, -s.gamma));
      }
      for (const BumpSpec& b : bumps) {
        double dx = x - b.x0[0];
        double dy = g.dimension == 2 ? y - b.x0[1] : 0.0;
        v += b.amp * std::exp(-(dx * dx + dy * dy) / (b.width * b.width));
      }
      f.values[g.idx(i, j)] = v;
    }
  }
  return f;
}

void to_json(nlohmann::json& j, const DataDescriptor& d) {
  nlohmann::json spikes = nlohmann::json::array();
  for (const auto& s : d.spikes)
    spikes.push_back({{"x0", s.x0}, {"gamma", s.gamma}, {"amp", s.amp}});
  nlohmann::json bumps = nlohmann::json::array();
  for (const auto& b : d.bumps)
    bumps.push_back({{"x0", b.x0}, {"width", b.width}, {"amp", b.amp}});
  j = nlohmann::json{{"spikes", spikes}, {"bumps", bumps}, {"cap_radius", d.cap_radius}};
}

void from_json(const nlohmann::json& j, DataDescriptor& d) {
  d = DataDescriptor{};
  if (j.contains("cap_radius")) j.at("cap_radius").get_to(d.cap_radius);
  if (j.contains("spikes"))
    for (const auto& s : j.at("spikes")) {
      SpikeSpec sp;
      s.at("x0").get_to(sp.x0);
      s.at("gamma").get_to(sp.gamma);
      if (s.contains("amp")) s.at("amp").get_to(sp.amp);
      d.spikes.push_back(sp);
    }
  if (j.contains("bumps"))
    for (const auto& b : j.at("bumps")) {
      BumpSpec bp;
      b.at("x0").get_to(bp.x0);
      b.at("width").get_to(bp.width);
      if (b.contains("amp")) b.at("amp").get_to(bp.amp);
      d.bumps.push_back(bp);
    }
}

DataDescriptor draw_descriptor(std::mt19937_64& rng, int dim, double gamma_lo,
                               double gamma_hi) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  DataDescriptor d;
  int nspikes = 1 + static_cast<int>(unif(rng) * 3.0) % 3;
  for (int s = 0; s < nspikes; ++s) {
    SpikeSpec sp;
    sp.x0 = {0.15 + 0.7 * unif(rng), dim == 2 ? 0.15 + 0.7 * unif(rng) : 0.0};
    sp.gamma = gamma_lo + (gamma_hi - gamma_lo) * unif(rng);
    sp.amp = std::exp(0.7 * (2.0 * unif(rng) - 1.0));
    d.spikes.push_back(sp);
  }
  int nbumps = 1 + (unif(rng) < 0.5 ? 1 : 0);
  for (int b = 0; b < nbumps; ++b) {
    BumpSpec bp;
    bp.x0 = {0.15 + 0.7 * unif(rng), dim == 2 ? 0.15 + 0.7 * unif(rng) : 0.0};
    bp.width = 0.05 + 0.15 * unif(rng);
    bp.amp = 0.2 + 1.8 * unif(rng);
    d.bumps.push_back(bp);
  }
  return d;
}

}  // namespace rispace
