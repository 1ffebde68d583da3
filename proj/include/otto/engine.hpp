#pragma once

#include <array>
#include <string>
#include <string_view>

#include "otto/qcore.hpp"

namespace otto {

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Thrown for invalid configuration values; field() names the offender.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what) : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Linear frequency ramp with a sinusoidal transverse pulse that vanishes at
// both ends of the stroke.
struct DrivingProtocol {
  double omega_start;
  double omega_end;
  double g_peak;
  double duration;

  double omega(double t) const { return (omega_end - omega_start) * t / duration + omega_start; }
  double g(double t) const;
};

struct CycleConfig {
  int d = 3;
  double omega_h = 10.0;
  double omega_c = 0.5;
  double T_h = 14.0;
  double T_c = 0.1;
  double g = 9.0;
  double t_k = 1.0;
  double t_e = 1.0;
  double lambda_h = 0.5;
  double lambda_c = 0.5;
  int propagator_steps = 256;
  double propagator_tol = 1e-11;
  double fixed_point_tol = 1e-13;
  double grouping_tol = 1e-9;
  double merge_tol = 1e-9;
  double regime_tol = 1e-10;

  // Throws ConfigError naming the first violated field.
  void validate() const;

  // Bath-contact times t = -ln(1 - lambda); infinite at lambda = 1.
  double t_hot() const;
  double t_cold() const;

  DrivingProtocol compression() const { return {omega_c, omega_h, g, t_k}; }
  DrivingProtocol expansion() const { return {omega_h, omega_c, g, t_e}; }
};

struct Propagator {
  ComplexMatrix unitary;
  int steps = 0;
  double achieved_error = 0.0;
};

// Product of midpoint exponentials exp(-i H(t_n + dt/2) dt), later times on
// the left, for H(t) = omega(t) sz + g(t) sx. The step count starts at
// `steps` and doubles until two successive products differ by less than
// `tol` in max-entry norm. Throws ConvergenceError past max_steps.
Propagator propagator(const DrivingProtocol& protocol, const ComplexMatrix& sx, const ComplexMatrix& sz, int steps,
                      double tol, int max_steps = 1 << 22);

// Same scheme evaluated in the spin-1/2 representation and lifted to spin
// (d-1)/2 with lift_su2(). The generator is a linear combination of sx and
// sz, so the lifted product equals the d-dimensional product exactly.
Propagator spin_propagator(const DrivingProtocol& protocol, int d, int steps, double tol, int max_steps = 1 << 26);

// The lifted midpoint product at a fixed step count, without refinement.
ComplexMatrix midpoint_unitary(const DrivingProtocol& protocol, int d, int steps);

// Spin-(d-1)/2 representation of a 2x2 unitary, built from the symmetric
// tensor power of the spinor map.
ComplexMatrix lift_su2(const Eigen::Matrix2cd& u, int d);

// Generalized amplitude damping towards sigma:
//   T(X) = (1-λ) X + λ σ tr X - 2 s (1 - s) Σ_j p_j (Π_j X Π_j - {Π_j, X}/2),  s = sqrt(1-λ)
// with σ = Σ_j p_j Π_j. apply() is the linear extension used for operator
// insertions; operator() maps states.
class GadChannel {
 public:
  GadChannel(double lambda, const DensityMatrix& sigma, const SpectralDecomposition& basis);

  ComplexMatrix apply(const ComplexMatrix& x) const;
  DensityMatrix operator()(const DensityMatrix& rho) const { return DensityMatrix::assume_valid(apply(rho.matrix())); }

  double lambda() const { return lambda_; }
  const std::vector<double>& populations() const { return p_; }

 private:
  double lambda_;
  double dissipator_weight_;
  ComplexMatrix sigma_;
  std::vector<ComplexMatrix> projectors_;
  std::vector<double> p_;
};

DensityMatrix gad_channel(const DensityMatrix& rho, double lambda, const DensityMatrix& sigma,
                          const SpectralDecomposition& basis);

DensityMatrix gibbs_state(const SpectralDecomposition& hamiltonian, double temperature);

struct CycleOperators {
  ComplexMatrix U_k;
  ComplexMatrix U_e;
  ComplexMatrix H_k;  // omega_h sz
  ComplexMatrix H_e;  // omega_c sz
  SpectralDecomposition H_k_end;
  SpectralDecomposition H_e_end;
  DensityMatrix gibbs_h;
  DensityMatrix gibbs_c;
  GadChannel hot;
  GadChannel cold;

  ComplexMatrix unitary_k(const ComplexMatrix& x) const { return U_k * x * U_k.adjoint(); }
  ComplexMatrix unitary_e(const ComplexMatrix& x) const { return U_e * x * U_e.adjoint(); }
};

CycleOperators build_cycle(const CycleConfig& config);
// Variant with precomputed stroke unitaries (d x d).
CycleOperators build_cycle(const CycleConfig& config, const ComplexMatrix& U_k, const ComplexMatrix& U_e);

// Λ = T_c ∘ U_e ∘ T_h ∘ U_k
DensityMatrix cycle_map(const DensityMatrix& rho, const CycleOperators& ops);

struct Corners {
  DensityMatrix rho1;  // after the cold isochore
  DensityMatrix rho2;  // after compression
  DensityMatrix rho3;  // after the hot isochore
  DensityMatrix rho4;  // after expansion
  int iterations = 0;
  double residual = 0.0;  // trace distance between Λ(rho1) and rho1

  const DensityMatrix& operator[](int corner) const;  // 1-based, corner 5 aliases 1
};

Corners corners_from(const DensityMatrix& rho1, const CycleOperators& ops);

// Forward iteration of Λ from `start` (maximally mixed by default).
Corners limit_cycle(const CycleOperators& ops, const CycleConfig& config);
Corners limit_cycle(const CycleOperators& ops, const CycleConfig& config, const DensityMatrix& start);

struct Thermo {
  double W;
  double Q_h;
  double Q_c;
};

Thermo unmeasured_thermo(const Corners& corners, const CycleOperators& ops);

enum class Regime { Engine, Accelerator, Heater, Other };

Regime classify_regime(double w, double qh, double qc, double tol = 1e-10);
std::string_view to_string(Regime r);

}  // namespace otto
