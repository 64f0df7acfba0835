#include "qhj/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qhj/errors.hpp"

namespace qhj {

namespace {

const cdouble kI{0.0, 1.0};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Wrapped phase of b relative to a, in (-pi, pi].
double step(cdouble a, cdouble b) { return std::arg(b * std::conj(a)); }

PhaseField unwrap(const SpaceTimeField& f, std::size_t base, double threshold) {
  const std::size_t n = f.grid.n;
  const std::size_t nt = f.times.count();
  if (f.values.size() != n * nt) throw InvalidArgument("field size does not match its grids");
  if (nt < 1) throw InvalidArgument("field has no time samples");

  PhaseField w;
  w.grid = f.grid;
  w.times = f.times;
  w.hbar = f.hbar;
  w.potential = f.potential;
  w.base_node = base;
  w.base_time = 0;
  w.zero_threshold = threshold;
  w.values.assign(n * nt, cdouble(kNaN, kNaN));
  w.mask.assign(n * nt, 0);

  for (std::size_t k = 0; k < nt; ++k) {
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cdouble z = f.at(k, i);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("field has non-finite values");
      peak = std::max(peak, std::abs(z));
    }
    std::size_t live = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool zero = !(std::abs(f.at(k, i)) >= threshold * peak) || peak == 0.0;
      w.mask[k * n + i] = zero ? 1 : 0;
      live += zero ? 0 : 1;
    }
    if (live == 0) {
      throw CausticSliceError("every node is masked at t=" + std::to_string(f.times.time(k)));
    }
  }

  // Unwrapped argument theta(k, i).
  std::vector<double> theta(n * nt, kNaN);
  for (std::size_t k = 0; k < nt; ++k) {
    if (w.mask[k * n + base]) {
      throw DomainError("branch base node is masked at t=" + std::to_string(f.times.time(k)));
    }
    theta[k * n + base] = k == 0 ? std::arg(f.at(0, base))
                                 : theta[(k - 1) * n + base] + step(f.at(k - 1, base), f.at(k, base));
    for (int dir : {-1, 1}) {
      std::size_t last = base;
      for (long i = static_cast<long>(base) + dir; i >= 0 && i < static_cast<long>(n); i += dir) {
        const auto u = static_cast<std::size_t>(i);
        if (w.mask[k * n + u]) continue;
        theta[k * n + u] = theta[k * n + last] + step(f.at(k, last), f.at(k, u));
        last = u;
      }
    }
  }

  const double hb = f.hbar;
  for (std::size_t idx = 0; idx < n * nt; ++idx) {
    if (w.mask[idx]) continue;
    w.values[idx] = cdouble(hb * theta[idx], -hb * std::log(std::abs(f.values[idx])));
  }

  for (std::size_t k = 0; k + 1 < nt; ++k) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t a = k * n + i, b = a + 1, c = a + n + 1, d = a + n;
      if (w.mask[a] || w.mask[b] || w.mask[c] || w.mask[d]) continue;
      const double loop = step(f.values[a], f.values[b]) + step(f.values[b], f.values[c]) +
                          step(f.values[c], f.values[d]) + step(f.values[d], f.values[a]);
      if (std::abs(loop) > std::numbers::pi) ++w.residues;
    }
  }
  return w;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  return 0.5 * (hi + *std::max_element(v.begin(), mid));
}

double worst(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

PhaseField extract_phase(const PropagatorSlab& slab, const PhaseOptions& opts) {
  slab.grid.validate();
  const std::size_t src = slab.grid.nearest(slab.source);
  const std::size_t base = opts.base_node ? *opts.base_node : std::min(src + 5, slab.grid.n - 1);
  PhaseField w = unwrap(slab, base, opts.zero_threshold);
  w.source = slab.source;
  return w;
}

PhaseField extract_phase(const WaveField& field, const PhaseOptions& opts) {
  field.grid.validate();
  std::size_t base = 0;
  if (opts.base_node) {
    base = *opts.base_node;
    if (base >= field.grid.n) throw InvalidArgument("base node outside the grid");
  } else {
    double peak = -1.0;
    for (std::size_t i = 0; i < field.grid.n; ++i) {
      if (field.values.size() > i && std::abs(field.values[i]) > peak) {
        peak = std::abs(field.values[i]);
        base = i;
      }
    }
  }
  PhaseField w = unwrap(field, base, opts.zero_threshold);
  w.source = std::numeric_limits<double>::quiet_NaN();
  return w;
}

std::vector<cdouble> phase_to_field(const PhaseField& w) {
  std::vector<cdouble> out(w.values.size(), 0.0);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    if (!w.mask[idx]) out[idx] = std::exp(kI * w.values[idx] / w.hbar);
  }
  return out;
}

double ResidualReport::worst_l2() const { return worst(l2); }
double ResidualReport::worst_max() const { return worst(max); }
double ResidualReport::worst_rel_max() const { return worst(rel_max); }
double ResidualReport::worst_rel_l2() const { return worst(rel_l2); }

ResidualReport qhje_residual(const PhaseField& w, const HamiltonianSpec& spec, const QhjeOptions& opts) {
  const std::size_t n = w.grid.n;
  const std::size_t nt = w.times.count();
  if (nt < 5) throw InvalidArgument("QHJE residual needs at least 5 time samples");
  if (w.values.size() != n * nt || w.mask.size() != n * nt) throw InvalidArgument("phase field size mismatch");

  const double hb = spec.hbar;
  const double dq = w.grid.dq();
  const double dt = w.times.dt();
  const std::size_t reach = std::max<std::size_t>(2, opts.collar);
  const double period = 2.0 * std::numbers::pi * hb;

  ResidualReport r;
  r.dq = dq;
  r.dt = dt;
  std::size_t usable_max = 0;
  std::vector<double> abs_r;
  for (std::size_t k = 1; k + 1 < nt; ++k) {
    double s2 = 0.0, smax = 0.0, rel_num2 = 0.0, rel_den2 = 0.0, rel_num_max = 0.0, rel_den_max = 0.0;
    abs_r.clear();
    // |psi| is rescaled per slice so that only ratios matter.
    double im_floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!w.masked(k, i)) im_floor = std::min(im_floor, w.at(k, i).imag());
    }
    for (std::size_t i = reach; i + reach < n; ++i) {
      const double q = w.grid.node(i);
      if (q < opts.window.q_lo || q > opts.window.q_hi) continue;
      bool ok = !w.masked(k - 1, i) && !w.masked(k + 1, i);
      for (std::size_t j = i - reach; ok && j <= i + reach; ++j) ok = !w.masked(k, j);
      if (!ok) continue;
      const cdouble f0 = w.at(k, i);
      auto near = [&](const cdouble& z) {
        return cdouble(z.real() - period * std::round((z.real() - f0.real()) / period), z.imag());
      };
      const cdouble fp1 = near(w.at(k, i + 1)), fm1 = near(w.at(k, i - 1));
      const cdouble fp2 = near(w.at(k, i + 2)), fm2 = near(w.at(k, i - 2));
      const cdouble wq = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * dq);
      const cdouble wqq = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * dq * dq);
      const cdouble wt = (near(w.at(k + 1, i)) - near(w.at(k - 1, i))) / (2.0 * dt);
      const double a = spec.a(q), da = spec.da(q), d2a = spec.d2a(q), b = spec.b(q), db = spec.db(q),
                   c = spec.c(q);
      const cdouble spatial = 2.0 * a * (wq * wq - kI * hb * wqq) + 2.0 * (b - kI * hb * da) * wq + c -
                              kI * hb * db - 0.5 * hb * hb * d2a;
      const cdouble res = spatial + wt;
      const double mag = std::abs(res);
      abs_r.push_back(mag);
      s2 += mag * mag;
      smax = std::max(smax, mag);
      const double amp = std::exp(-(f0.imag() - im_floor) / hb);
      const double hpsi = std::abs(spatial) * amp;
      rel_num2 += mag * mag * amp * amp;
      rel_den2 += hpsi * hpsi;
      rel_num_max = std::max(rel_num_max, mag * amp);
      rel_den_max = std::max(rel_den_max, hpsi);
    }
    if (abs_r.empty()) continue;
    usable_max = std::max(usable_max, abs_r.size());
    r.times.push_back(w.times.time(k));
    r.counts.push_back(abs_r.size());
    r.l2.push_back(std::sqrt(s2 / static_cast<double>(abs_r.size())));
    r.max.push_back(smax);
    r.median.push_back(median_of(abs_r));
    r.rel_l2.push_back(rel_den2 > 0.0 ? std::sqrt(rel_num2 / rel_den2) : std::sqrt(rel_num2));
    r.rel_max.push_back(rel_den_max > 0.0 ? rel_num_max / rel_den_max : rel_num_max);
  }
  if (r.times.size() < 3 || usable_max < 5) {
    throw InvalidArgument("QHJE residual needs at least 5 usable nodes and interior times");
  }
  return r;
}

SmallTimeReport small_t_boundary_check(const PhaseField& w, double m, double hbar, double potential_scale,
                                       const ResidualWindow& window) {
  const std::size_t nt = w.times.count();
  if (nt < 5) throw InvalidArgument("small-t check needs at least 5 times");
  if (!std::isfinite(w.source)) throw InvalidArgument("small-t check needs a propagator phase");
  if (potential_scale * w.times.t_min / hbar >= 1e-2) {
    throw InvalidArgument("t-range too coarse: |V| t_min / hbar must be below 1e-2");
  }
  const std::size_t n = w.grid.n;
  SmallTimeReport rep;
  std::vector<double> ts;
  std::vector<cdouble> means;
  bool have_ref = false;
  cdouble ref;
  for (std::size_t k = 0; k < 5; ++k) {
    const double t = w.times.time(k);
    std::vector<cdouble> rem;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = w.grid.node(i);
      if (q < window.q_lo || q > window.q_hi || w.masked(k, i)) continue;
      const double d = q - w.source;
      rem.push_back(w.at(k, i) - m * d * d / (2.0 * t) - 0.5 * kI * hbar * std::log(t));
    }
    if (rem.empty()) throw InvalidArgument("small-t check window has no unmasked nodes");
    if (!have_ref) {
      ref = rem[rem.size() / 2];
      have_ref = true;
    }
    cdouble mean = 0.0;
    for (const auto& z : rem) mean += z;
    mean /= static_cast<double>(rem.size());
    double spread = 0.0;
    for (const auto& z : rem) {
      spread = std::max(spread, std::abs(z - mean));
      rep.max_deviation = std::max(rep.max_deviation, std::abs(z - ref));
    }
    rep.times.push_back(t);
    rep.spread.push_back(spread);
    ts.push_back(t);
    means.push_back(mean);
  }
  double tbar = 0.0;
  cdouble mbar = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    tbar += ts[k];
    mbar += means[k];
  }
  tbar /= static_cast<double>(ts.size());
  mbar /= static_cast<double>(ts.size());
  double stt = 0.0;
  cdouble stm = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - tbar) * (ts[k] - tbar);
    stm += (ts[k] - tbar) * (means[k] - mbar);
  }
  rep.slope = std::abs(stm / stt);
  return rep;
}

ResidualReport particular_solution_check(const WaveField& field, const HamiltonianSpec& spec,
                                         const QhjeOptions& opts, const PhaseOptions& phase_opts) {
  return qhje_residual(extract_phase(field, phase_opts), spec, opts);
}

}  // namespace qhj
