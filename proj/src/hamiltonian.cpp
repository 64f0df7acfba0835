#include "qhj/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "qhj/errors.hpp"

namespace qhj {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive");
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_slope(double x) {
  const double s = logistic(x);
  return s * (1.0 - s);
}

struct HermitePiece {
  std::size_t k;
  double h, s;
};

HermitePiece locate(const PotentialTable& t, double q) {
  auto it = std::upper_bound(t.q.begin(), t.q.end(), q);
  std::size_t k = static_cast<std::size_t>(std::distance(t.q.begin(), it));
  k = std::clamp<std::size_t>(k, 1, t.q.size() - 1) - 1;
  const double h = t.q[k + 1] - t.q[k];
  return {k, h, (q - t.q[k]) / h};
}

}  // namespace

Potential Potential::free(double mass) {
  require_positive(mass, "mass");
  return Potential(Kind::free, mass);
}

Potential Potential::harmonic(double mass, double omega) {
  require_positive(mass, "mass");
  require_positive(omega, "omega");
  return Potential(Kind::harmonic, mass, omega);
}

Potential Potential::linear(double mass, double force) {
  require_positive(mass, "mass");
  if (!std::isfinite(force)) throw InvalidArgument("force must be finite");
  return Potential(Kind::linear, mass, force);
}

Potential Potential::barrier(double mass, double V0, double width) {
  require_positive(mass, "mass");
  require_positive(width, "barrier width");
  if (!std::isfinite(V0)) throw InvalidArgument("barrier height must be finite");
  return Potential(Kind::barrier, mass, V0, width);
}

Potential Potential::custom(double mass, PotentialTable table) {
  require_positive(mass, "mass");
  if (table.q.size() < 2 || table.V.size() != table.q.size() || table.dV.size() != table.q.size()) {
    throw InvalidArgument("custom potential table needs at least two rows of (q, V, dV)");
  }
  for (std::size_t k = 0; k < table.q.size(); ++k) {
    if (!std::isfinite(table.q[k]) || !std::isfinite(table.V[k]) || !std::isfinite(table.dV[k])) {
      throw InvalidArgument("custom potential table has non-finite entries");
    }
    if (k > 0 && !(table.q[k] > table.q[k - 1])) {
      throw InvalidArgument("custom potential table must be strictly increasing in q");
    }
  }
  Potential p(Kind::custom, mass);
  p.table_ = std::move(table);
  return p;
}

const char* Potential::tag() const {
  switch (kind_) {
    case Kind::free:
      return "free";
    case Kind::harmonic:
      return "harmonic";
    case Kind::linear:
      return "linear";
    case Kind::barrier:
      return "barrier";
    case Kind::custom:
      return "custom";
  }
  return "free";
}

double Potential::value(double q) const {
  switch (kind_) {
    case Kind::free:
      return 0.0;
    case Kind::harmonic:
      return 0.5 * mass_ * p1_ * p1_ * q * q;
    case Kind::linear:
      return -p1_ * q;
    case Kind::barrier:
      return std::abs(q) < 0.5 * p2_ ? p1_ : 0.0;
    case Kind::custom: {
      const auto& t = table_;
      if (q <= t.q.front()) return t.V.front();
      if (q >= t.q.back()) return t.V.back();
      const auto [k, h, s] = locate(t, q);
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * t.V[k] + (s3 - 2 * s2 + s) * h * t.dV[k] + (-2 * s3 + 3 * s2) * t.V[k + 1] +
             (s3 - s2) * h * t.dV[k + 1];
    }
  }
  return 0.0;
}

double Potential::derivative(double q) const {
  switch (kind_) {
    case Kind::free:
      return 0.0;
    case Kind::harmonic:
      return mass_ * p1_ * p1_ * q;
    case Kind::linear:
      return -p1_;
    case Kind::barrier:
      return 0.0;
    case Kind::custom: {
      const auto& t = table_;
      if (q <= t.q.front() || q >= t.q.back()) return 0.0;
      const auto [k, h, s] = locate(t, q);
      const double s2 = s * s;
      return ((6 * s2 - 6 * s) * t.V[k] + (-6 * s2 + 6 * s) * t.V[k + 1]) / h + (3 * s2 - 4 * s + 1) * t.dV[k] +
             (3 * s2 - 2 * s) * t.dV[k + 1];
    }
  }
  return 0.0;
}

double Potential::second_derivative(double q) const {
  switch (kind_) {
    case Kind::harmonic:
      return mass_ * p1_ * p1_;
    case Kind::custom: {
      const auto& t = table_;
      if (q <= t.q.front() || q >= t.q.back()) return 0.0;
      const auto [k, h, s] = locate(t, q);
      return ((12 * s - 6) * t.V[k] + (-12 * s + 6) * t.V[k + 1]) / (h * h) +
             ((6 * s - 4) * t.dV[k] + (6 * s - 2) * t.dV[k + 1]) / h;
    }
    default:
      return 0.0;
  }
}

double Potential::cell_average(double q, double h) const {
  if (kind_ != Kind::barrier) return value(q);
  const double lo = std::max(q - 0.5 * h, -0.5 * p2_);
  const double hi = std::min(q + 0.5 * h, 0.5 * p2_);
  return hi > lo ? p1_ * (hi - lo) / h : 0.0;
}

double Potential::smooth_value(double q, double ramp) const {
  if (kind_ != Kind::barrier) return value(q);
  const double r = ramp * p2_;
  return p1_ * (logistic((q + 0.5 * p2_) / r) - logistic((q - 0.5 * p2_) / r));
}

double Potential::smooth_force(double q, double ramp) const {
  if (kind_ != Kind::barrier) return -derivative(q);
  const double r = ramp * p2_;
  return -p1_ * (logistic_slope((q + 0.5 * p2_) / r) - logistic_slope((q - 0.5 * p2_) / r)) / r;
}

double Potential::max_abs(double lo, double hi) const {
  switch (kind_) {
    case Kind::free:
      return 0.0;
    case Kind::harmonic:
    case Kind::linear:
      return std::max(std::abs(value(lo)), std::abs(value(hi)));
    case Kind::barrier:
      return (hi > -0.5 * p2_ && lo < 0.5 * p2_) ? std::abs(p1_) : 0.0;
    case Kind::custom: {
      double m = std::max(std::abs(value(lo)), std::abs(value(hi)));
      for (std::size_t k = 0; k < table_.q.size(); ++k) {
        if (table_.q[k] >= lo && table_.q[k] <= hi) m = std::max(m, std::abs(table_.V[k]));
      }
      const int n = 512;
      for (int k = 0; k <= n; ++k) m = std::max(m, std::abs(value(lo + (hi - lo) * k / n)));
      return m;
    }
  }
  return 0.0;
}

HamiltonianSpec from_standard(const Potential& pot, double hbar) {
  require_positive(hbar, "hbar");
  require_positive(pot.mass(), "mass");
  const double a = 0.25 / pot.mass();
  HamiltonianSpec s;
  s.a = [a](double) { return a; };
  s.da = [](double) { return 0.0; };
  s.d2a = [](double) { return 0.0; };
  s.b = [](double) { return 0.0; };
  s.db = [](double) { return 0.0; };
  s.c = [pot](double q) { return pot.value(q); };
  s.hbar = hbar;
  return s;
}

double classical_hamiltonian(const HamiltonianSpec& spec, double q, double p) {
  return 2.0 * spec.a(q) * p * p + 2.0 * spec.b(q) * p + spec.c(q);
}

void validate_spec(const HamiltonianSpec& spec, const std::vector<double>& samples, double h, double tol) {
  if (!(spec.hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  auto central = [h](const HamiltonianSpec::Fn& f, double q) { return (f(q + h) - f(q - h)) / (2.0 * h); };
  for (double q : samples) {
    if (q < spec.q_lo || q > spec.q_hi) continue;
    const double a = spec.a(q);
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("a(q) must be positive at q=" + std::to_string(q));
    for (const auto* f : {&spec.da, &spec.d2a, &spec.b, &spec.db, &spec.c}) {
      if (!std::isfinite((*f)(q))) throw InvalidArgument("non-finite coefficient at q=" + std::to_string(q));
    }
    auto check = [&](double supplied, double fd, const char* name) {
      if (std::abs(supplied - fd) > tol * std::max(1.0, std::abs(fd))) {
        throw InvalidArgument(std::string(name) + " disagrees with central differences at q=" + std::to_string(q));
      }
    };
    check(spec.da(q), central(spec.a, q), "a'");
    check(spec.d2a(q), central(spec.da, q), "a''");
    check(spec.db(q), central(spec.b, q), "b'");
  }
}

}  // namespace qhj
