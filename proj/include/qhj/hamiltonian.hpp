#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qhj {

/// Sampled potential with analytic slopes, interpolated by cubic Hermite
/// pieces. Outside the table the end values are held constant.
struct PotentialTable {
  std::vector<double> q;
  std::vector<double> V;
  std::vector<double> dV;
};

/// One-dimensional potential V(q) together with the particle mass.
class Potential {
 public:
  enum class Kind { free, harmonic, linear, barrier, custom };

  static Potential free(double mass = 1.0);
  static Potential harmonic(double mass, double omega);
  /// Constant force F: V(q) = -F q.
  static Potential linear(double mass, double force);
  /// V0 on |q| < width/2, zero outside.
  static Potential barrier(double mass, double V0, double width);
  static Potential custom(double mass, PotentialTable table);

  Kind kind() const { return kind_; }
  const char* tag() const;
  double mass() const { return mass_; }
  double omega() const { return p1_; }
  double force() const { return p1_; }
  double height() const { return p1_; }
  double width() const { return p2_; }
  const PotentialTable& table() const { return table_; }

  double value(double q) const;
  double derivative(double q) const;
  double second_derivative(double q) const;

  /// Mean of V over [q - h/2, q + h/2]; exact for the barrier, the midpoint
  /// value otherwise. Used to sample discontinuous potentials on a lattice.
  double cell_average(double q, double h) const;

  /// Lipschitz version used for trajectory integration. The barrier step is
  /// replaced by V0*(s((q + w/2)/r) - s((q - w/2)/r)), s logistic, r = ramp*w.
  double smooth_value(double q, double ramp = 0.05) const;
  double smooth_force(double q, double ramp = 0.05) const;

  /// Largest |V| over [lo, hi] (sampled; exact for the built-in shapes).
  double max_abs(double lo, double hi) const;

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  Potential(Kind k, double mass, double p1 = 0.0, double p2 = 0.0) : kind_(k), mass_(mass), p1_(p1), p2_(p2) {}

  Kind kind_ = Kind::free;
  double mass_ = 1.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  PotentialTable table_;
};

/// Weyl-ordered one-dimensional Hamiltonian
///   H = a p p/2 + p a p + p p a/2 + b p + p b + c
/// with coefficient functions of q and the derivatives the c-number QHJE uses.
struct HamiltonianSpec {
  using Fn = std::function<double(double)>;

  Fn a, da, d2a;
  Fn b, db;
  Fn c;
  double hbar = 1.0;
  double q_lo = -1e300;
  double q_hi = 1e300;
};

HamiltonianSpec from_standard(const Potential& pot, double hbar);

/// 2 a(q) p^2 + 2 b(q) p + c(q).
double classical_hamiltonian(const HamiltonianSpec& spec, double q, double p);

/// Checks a > 0 and finiteness at the sample points and that supplied
/// derivatives agree with central differences of step h to tolerance tol.
/// Throws InvalidArgument naming the first violation.
void validate_spec(const HamiltonianSpec& spec, const std::vector<double>& samples, double h = 1e-4,
                   double tol = 1e-5);

}  // namespace qhj
