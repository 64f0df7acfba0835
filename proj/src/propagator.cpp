#include "qhj/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhj/errors.hpp"
#include "qhj/fft.hpp"

namespace qhj {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCausticMargin = 0.1;
const cdouble kI{0.0, 1.0};

// sqrt(1/i) on the branch e^{-i pi/4}.
const cdouble kInvSqrtI = std::polar(1.0, -0.25 * kPi);

void check_grids(const SpatialGrid& grid, const TimeGrid& times) {
  grid.validate();
  times.validate();
}

void check_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
}

// Strang stepping from t = 0 through every output time. psi is advanced in
// place; each output interval is split into equal substeps no longer than h.
template <class Sink>
void strang_run(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times, double h,
                std::vector<cdouble>& psi, Sink&& sink) {
  const std::size_t n = grid.n;
  const double m = pot.mass();
  const double dq = grid.dq();
  std::vector<double> V(n);
  for (std::size_t i = 0; i < n; ++i) V[i] = pot.cell_average(grid.node(i), dq);
  const std::vector<double> k = grid.wavenumbers();

  FftPlan plan(psi);
  std::vector<cdouble> half_v(n), kin(n);
  double t = 0.0;
  double cached_step = -1.0;
  for (std::size_t out = 0; out < times.count(); ++out) {
    const double target = times.time(out);
    const double span = target - t;
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h - 1e-9)));
    const double step = span / static_cast<double>(substeps);
    if (std::abs(step - cached_step) > 1e-15 * std::max(1.0, step)) {
      for (std::size_t i = 0; i < n; ++i) {
        half_v[i] = std::polar(1.0, -0.5 * V[i] * step / hbar);
        // FFTW's backward transform is unnormalized; fold 1/n in here.
        kin[i] = std::polar(1.0 / static_cast<double>(n), -hbar * k[i] * k[i] * step / (2.0 * m));
      }
      cached_step = step;
    }
    for (std::size_t s = 0; s < substeps; ++s) {
      for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];
      plan.forward();
      for (std::size_t i = 0; i < n; ++i) psi[i] *= kin[i];
      plan.backward();
      for (std::size_t i = 0; i < n; ++i) psi[i] *= half_v[i];
    }
    t = target;
    sink(out, psi);
  }
}

double slice_norm(const std::vector<cdouble>& psi, double dq) {
  double s = 0.0;
  for (const auto& z : psi) s += std::norm(z);
  return s * dq;
}

}  // namespace

cdouble kernel_free(double m, double hbar, double q, double Q, double t) {
  if (!(t > 0.0)) throw DomainError("free kernel requires t > 0");
  check_hbar(hbar);
  const double d = q - Q;
  const double amp = std::sqrt(m / (2.0 * kPi * hbar * t));
  return amp * kInvSqrtI * std::polar(1.0, m * d * d / (2.0 * hbar * t));
}

cdouble kernel_harmonic(double m, double omega, double hbar, double q, double Q, double t) {
  if (!(t > 0.0)) throw DomainError("harmonic kernel requires t > 0");
  check_hbar(hbar);
  if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
  const double wt = omega * t;
  if (wt > kPi - kCausticMargin) throw CausticError("omega*t is within the caustic margin of pi");
  const double s = std::sin(wt);
  const double c = std::cos(wt);
  const double amp = std::sqrt(m * omega / (2.0 * kPi * hbar * s));
  const double phase = m * omega / (2.0 * hbar * s) * ((q * q + Q * Q) * c - 2.0 * q * Q);
  return amp * kInvSqrtI * std::polar(1.0, phase);
}

double SpaceTimeField::norm(std::size_t k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) s += std::norm(at(k, i));
  return s * grid.dq();
}

PropagatorSlab analytic_slab(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                             double Q) {
  check_grids(grid, times);
  PropagatorSlab s;
  s.grid = grid;
  s.times = times;
  s.potential = pot;
  s.hbar = hbar;
  s.source = Q;
  s.values.resize(grid.n * times.count());
  switch (pot.kind()) {
    case Potential::Kind::free:
      s.method = "analytic-free";
      break;
    case Potential::Kind::harmonic:
      s.method = "analytic-harmonic";
      break;
    default:
      throw InvalidArgument(std::string("no closed-form kernel for potential '") + pot.tag() + "'");
  }
  for (std::size_t k = 0; k < times.count(); ++k) {
    const double t = times.time(k);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double q = grid.node(i);
      s.at(k, i) = pot.kind() == Potential::Kind::free ? kernel_free(pot.mass(), hbar, q, Q, t)
                                                       : kernel_harmonic(pot.mass(), pot.omega(), hbar, q, Q, t);
    }
  }
  return s;
}

double auto_band_limit(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                       double Q) {
  const double m = pot.mass();
  const double cap = 0.45 * kPi / grid.dq();
  // Position of momentum p at time t is centre(t) + s(t) p. The filtered delta
  // also carries a Fresnel tail beyond hbar*k_c; in wavenumber units it reaches
  // 1e-6 of the plateau within F(x)/sqrt(hbar T), x = k_c sqrt(hbar T), where T
  // is the chirp time of the initial data. F(x) <= 2 + 110/x + 0.16 x bounds the
  // measured tail of the order-16 filter for 3 <= x <= 80.
  double kc = cap;
  constexpr int kSamples = 16;
  for (int j = 0; j <= kSamples; ++j) {
    const double t = times.t_min + (times.t_max - times.t_min) * j / kSamples;
    double centre = Q;
    double s = t / m;
    double inv_chirp = m / t;
    if (pot.kind() == Potential::Kind::harmonic) {
      const double w = pot.omega();
      centre = Q * std::cos(w * t);
      s = std::abs(std::sin(w * t)) / (m * w);
      inv_chirp = m * w * std::abs(std::cos(w * t) / std::sin(w * t));
    } else if (pot.kind() == Potential::Kind::linear) {
      centre = Q + pot.force() * t * t / (2.0 * m);
    }
    const double reach = std::min(centre - grid.q_min, grid.q_max - centre);
    // 1.16 hbar s k^2 - (reach - 2 s sqrt(hbar/T)) k + 110 s/T <= 0
    const double a = 1.16 * hbar * s;
    const double b = reach - 2.0 * s * std::sqrt(hbar * inv_chirp);
    const double c = 110.0 * s * inv_chirp;
    const double disc = b * b - 4.0 * a * c;
    if (!(b > 0.0) || disc < 0.0) {
      throw DomainTooSmallError("box is too small to hold the band-limited propagator at t=" + std::to_string(t));
    }
    const double lo = (b - std::sqrt(disc)) / (2.0 * a);
    const double hi = (b + std::sqrt(disc)) / (2.0 * a);
    if (lo > cap) throw DomainTooSmallError("grid is too coarse for the box at t=" + std::to_string(t));
    kc = std::min(kc, hi);
  }
  return kc;
}

double strang_step(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                   const EvolveOptions& opts) {
  if (opts.fixed_step) {
    if (!(*opts.fixed_step > 0.0)) throw InvalidArgument("fixed_step must be positive");
    return *opts.fixed_step;
  }
  const double kmax = kPi / grid.dq();
  double h = 0.25 * kPi * 2.0 * pot.mass() / (hbar * kmax * kmax);
  h = std::min(h, times.t_min / 10.0);
  if (opts.max_step) {
    if (!(*opts.max_step > 0.0)) throw InvalidArgument("max_step must be positive");
    h = std::min(h, *opts.max_step);
  }
  return h;
}

PropagatorSlab evolve_split_operator(const Potential& pot, double hbar, const SpatialGrid& grid,
                                     const TimeGrid& times, double Q, const EvolveOptions& opts) {
  check_grids(grid, times);
  check_hbar(hbar);
  if (!grid.is_node(Q)) throw InvalidArgument("source Q must be a grid node");
  if (pot.kind() == Potential::Kind::harmonic && pot.omega() * times.t_max > kPi - kCausticMargin) {
    throw CausticError("harmonic run reaches the caustic margin (omega*t > pi - 0.1)");
  }
  const std::size_t n = grid.n;
  const double dq = grid.dq();

  std::vector<cdouble> psi(n, 0.0);
  psi[grid.nearest(Q)] = 1.0 / dq;
  double cutoff = 0.0;
  if (opts.filter) {
    const double kc = opts.band_limit ? *opts.band_limit : auto_band_limit(pot, hbar, grid, times, Q);
    if (!(kc > 0.0)) throw InvalidArgument("band limit must be positive");
    const auto k = grid.wavenumbers();
    FftPlan plan(psi);
    plan.forward();
    for (std::size_t i = 0; i < n; ++i) {
      psi[i] *= std::exp(-std::pow(std::abs(k[i]) / kc, opts.filter_order)) / static_cast<double>(n);
    }
    plan.backward();
    cutoff = hbar * kc;
  }

  PropagatorSlab slab;
  slab.grid = grid;
  slab.times = times;
  slab.potential = pot;
  slab.hbar = hbar;
  slab.source = Q;
  slab.method = "split-operator";
  slab.momentum_cutoff = cutoff;
  slab.values.resize(n * times.count());

  const double norm0 = slice_norm(psi, dq);
  double drift = 0.0;
  const double h = strang_step(pot, hbar, grid, times, opts);
  strang_run(pot, hbar, grid, times, h, psi, [&](std::size_t out, const std::vector<cdouble>& cur) {
    double peak = 0.0;
    for (const auto& z : cur) peak = std::max(peak, std::abs(z));
    const double edge = std::max(std::abs(cur.front()), std::abs(cur.back()));
    if (edge > opts.edge_tolerance * peak) {
      throw DomainTooSmallError("propagator reaches the box edge at t=" + std::to_string(times.time(out)) +
                                " (edge/max = " + std::to_string(edge / peak) + ")");
    }
    std::copy(cur.begin(), cur.end(), slab.values.begin() + static_cast<std::ptrdiff_t>(out * n));
    drift = std::max(drift, std::abs(slice_norm(cur, dq) - norm0) / norm0);
  });
  slab.norm_drift = drift;
  return slab;
}

WaveField evolve_wave(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                      const std::vector<cdouble>& psi0, const EvolveOptions& opts) {
  check_grids(grid, times);
  check_hbar(hbar);
  if (psi0.size() != grid.n) throw InvalidArgument("initial wave function does not match the grid");
  WaveField field;
  field.grid = grid;
  field.times = times;
  field.potential = pot;
  field.hbar = hbar;
  field.method = "split-operator";
  field.values.resize(grid.n * times.count());
  std::vector<cdouble> psi = psi0;
  const double norm0 = slice_norm(psi, grid.dq());
  if (!(norm0 > 0.0)) throw InvalidArgument("initial wave function vanishes");
  double drift = 0.0;
  const double h = strang_step(pot, hbar, grid, times, opts);
  strang_run(pot, hbar, grid, times, h, psi, [&](std::size_t out, const std::vector<cdouble>& cur) {
    std::copy(cur.begin(), cur.end(), field.values.begin() + static_cast<std::ptrdiff_t>(out * grid.n));
    drift = std::max(drift, std::abs(slice_norm(cur, grid.dq()) - norm0) / norm0);
  });
  field.norm_drift = drift;
  return field;
}

std::vector<PropagatorSlab> build_family(const Potential& pot, double hbar, const SpatialGrid& grid,
                                         const TimeGrid& times, const std::vector<double>& Q_nodes,
                                         const EvolveOptions& opts) {
  std::vector<PropagatorSlab> family;
  family.reserve(Q_nodes.size());
  for (double Q : Q_nodes) family.push_back(evolve_split_operator(pot, hbar, grid, times, Q, opts));
  return family;
}

WaveField convolve(const std::vector<PropagatorSlab>& family, const std::vector<cdouble>& phi) {
  if (family.empty()) throw InvalidArgument("convolution needs at least one slab");
  const PropagatorSlab& first = family.front();
  if (phi.size() != first.grid.n) throw InvalidArgument("phi does not match the slab grid");
  std::vector<const PropagatorSlab*> by_node(first.grid.n, nullptr);
  for (const auto& s : family) {
    if (!(s.grid == first.grid) || !(s.times == first.times)) throw InvalidArgument("slabs do not share grids");
    if (s.values.size() != s.grid.n * s.times.count()) throw InvalidArgument("slab has the wrong size");
    by_node[s.grid.nearest(s.source)] = &s;
  }
  double peak = 0.0;
  for (const auto& z : phi) peak = std::max(peak, std::abs(z));
  WaveField out;
  out.grid = first.grid;
  out.times = first.times;
  out.potential = first.potential;
  out.hbar = first.hbar;
  out.method = "convolution";
  out.momentum_cutoff = first.momentum_cutoff;
  out.values.assign(first.values.size(), 0.0);
  const double dq = first.grid.dq();
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (std::abs(phi[j]) <= 1e-14 * peak) continue;
    if (!by_node[j]) {
      throw InvalidArgument("no slab for source node q=" + std::to_string(first.grid.node(j)) + " where phi != 0");
    }
    const cdouble w = dq * phi[j];
    const auto& v = by_node[j]->values;
    for (std::size_t k = 0; k < v.size(); ++k) out.values[k] += w * v[k];
  }
  return out;
}

WaveField convolve(const Potential& pot, double hbar, const SpatialGrid& grid, const TimeGrid& times,
                   const std::vector<cdouble>& phi, const EvolveOptions& opts) {
  if (phi.size() != grid.n) throw InvalidArgument("phi does not match the grid");
  double peak = 0.0;
  for (const auto& z : phi) peak = std::max(peak, std::abs(z));
  if (!(peak > 0.0) || !std::isfinite(peak)) throw InvalidArgument("phi must be finite and nonzero");
  WaveField out;
  out.grid = grid;
  out.times = times;
  out.potential = pot;
  out.hbar = hbar;
  out.method = "convolution";
  out.values.assign(grid.n * times.count(), 0.0);
  const double dq = grid.dq();
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (std::abs(phi[j]) <= 1e-14 * peak) continue;
    const auto slab = evolve_split_operator(pot, hbar, grid, times, grid.node(j), opts);
    out.momentum_cutoff = std::max(out.momentum_cutoff, slab.momentum_cutoff);
    const cdouble w = dq * phi[j];
    for (std::size_t k = 0; k < slab.values.size(); ++k) out.values[k] += w * slab.values[k];
  }
  return out;
}

double SchrodingerResidual::worst_l2() const { return l2.empty() ? 0.0 : *std::max_element(l2.begin(), l2.end()); }
double SchrodingerResidual::worst_max() const {
  return max.empty() ? 0.0 : *std::max_element(max.begin(), max.end());
}

SchrodingerResidual schrodinger_residual(const SpaceTimeField& field, const HamiltonianSpec& spec,
                                         const ResidualWindow& window) {
  const std::size_t n = field.grid.n;
  const std::size_t nt = field.times.count();
  if (nt < 5) throw InvalidArgument("Schrodinger residual needs at least 5 time samples");
  if (field.values.size() != n * nt) throw InvalidArgument("field size does not match its grids");
  std::vector<std::size_t> nodes;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double q = field.grid.node(i);
    if (q >= window.q_lo && q <= window.q_hi) nodes.push_back(i);
  }
  if (nodes.size() < 5) throw InvalidArgument("Schrodinger residual needs at least 5 interior nodes");

  const double hb = spec.hbar;
  const double dq = field.grid.dq();
  const double dt = field.times.dt();
  struct Coef {
    double a, da, d2a, b, db, c;
  };
  std::vector<Coef> coef(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double q = field.grid.node(nodes[j]);
    coef[j] = {spec.a(q), spec.da(q), spec.d2a(q), spec.b(q), spec.db(q), spec.c(q)};
  }

  SchrodingerResidual r;
  for (std::size_t k = 1; k + 1 < nt; ++k) {
    double num2 = 0.0, den2 = 0.0, num_max = 0.0, den_max = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const std::size_t i = nodes[j];
      const cdouble f0 = field.at(k, i);
      const cdouble fp1 = field.at(k, i + 1), fm1 = field.at(k, i - 1);
      const cdouble fp2 = field.at(k, i + 2), fm2 = field.at(k, i - 2);
      const cdouble d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * dq);
      const cdouble d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * dq * dq);
      const cdouble ft = (field.at(k + 1, i) - field.at(k - 1, i)) / (2.0 * dt);
      const Coef& c = coef[j];
      const cdouble hpsi = -2.0 * hb * hb * c.a * d2 - 2.0 * hb * hb * c.da * d1 - 0.5 * hb * hb * c.d2a * f0 -
                           2.0 * kI * hb * c.b * d1 - kI * hb * c.db * f0 + c.c * f0;
      const cdouble res = kI * hb * ft - hpsi;
      num2 += std::norm(res);
      den2 += std::norm(hpsi);
      num_max = std::max(num_max, std::abs(res));
      den_max = std::max(den_max, std::abs(hpsi));
    }
    r.times.push_back(field.times.time(k));
    r.l2.push_back(den2 > 0.0 ? std::sqrt(num2 / den2) : std::sqrt(num2 / nodes.size()));
    r.max.push_back(den_max > 0.0 ? num_max / den_max : num_max);
  }
  return r;
}

}  // namespace qhj
