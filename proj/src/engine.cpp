#include "otto/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace otto {

namespace {

constexpr double kSigmaDiagonalTol = 1e-10;

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

double contact_time(double lambda) {
  return lambda >= 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-lambda);
}

}  // namespace

void CycleConfig::validate() const {
  require(d >= 2, "d", "dimension must be >= 2");
  require(d <= 64, "d", "dimension above 64 is not supported");
  require(std::isfinite(omega_c) && omega_c > 0.0, "omega_c", "must be > 0");
  require(std::isfinite(omega_h) && omega_h > omega_c, "omega_h", "must exceed omega_c");
  require(std::isfinite(T_h) && T_h > 0.0, "T_h", "must be > 0");
  require(std::isfinite(T_c) && T_c > 0.0, "T_c", "must be > 0");
  require(std::isfinite(g) && g >= 0.0, "g", "must be >= 0");
  require(std::isfinite(t_k) && t_k > 0.0, "t_k", "must be > 0");
  require(std::isfinite(t_e) && t_e > 0.0, "t_e", "must be > 0");
  require(lambda_h >= 0.0 && lambda_h <= 1.0, "lambda_h", "must lie in [0, 1]");
  require(lambda_c >= 0.0 && lambda_c <= 1.0, "lambda_c", "must lie in [0, 1]");
  require(propagator_steps >= 2, "propagator_steps", "must be >= 2");
  require(propagator_tol > 0.0, "propagator_tol", "must be > 0");
  require(fixed_point_tol > 0.0, "fixed_point_tol", "must be > 0");
  require(grouping_tol >= 0.0, "grouping_tol", "must be >= 0");
  require(merge_tol >= 0.0, "merge_tol", "must be >= 0");
  require(regime_tol >= 0.0, "regime_tol", "must be >= 0");
}

double CycleConfig::t_hot() const { return contact_time(lambda_h); }
double CycleConfig::t_cold() const { return contact_time(lambda_c); }

GadChannel::GadChannel(double lambda, const DensityMatrix& sigma, const SpectralDecomposition& basis)
    : lambda_(lambda), sigma_(sigma.matrix()), projectors_(basis.projectors) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("gad_channel: lambda must lie in [0, 1]");
  if (basis.dim() != sigma.dim()) throw Error("gad_channel: dimension mismatch");
  ComplexMatrix rebuilt = ComplexMatrix::Zero(sigma.dim(), sigma.dim());
  for (const auto& proj : projectors_) {
    const double p = (proj * sigma_).trace().real() / proj.trace().real();
    p_.push_back(p);
    rebuilt += p * proj;
  }
  if (max_abs(rebuilt - sigma_) > kSigmaDiagonalTol) throw Error("gad_channel: sigma is not diagonal in the basis");
  const double s = std::sqrt(1.0 - lambda);
  dissipator_weight_ = 2.0 * s * (1.0 - s);
}

ComplexMatrix GadChannel::apply(const ComplexMatrix& x) const {
  ComplexMatrix out = (1.0 - lambda_) * x + lambda_ * x.trace() * sigma_;
  if (dissipator_weight_ == 0.0) return out;
  for (std::size_t j = 0; j < projectors_.size(); ++j) {
    const auto& proj = projectors_[j];
    const ComplexMatrix px = proj * x;
    const ComplexMatrix xp = x * proj;
    out -= (dissipator_weight_ * p_[j]) * (px * proj - 0.5 * (px + xp));
  }
  return out;
}

DensityMatrix gad_channel(const DensityMatrix& rho, double lambda, const DensityMatrix& sigma,
                          const SpectralDecomposition& basis) {
  if (rho.dim() != sigma.dim()) throw Error("gad_channel: dimension mismatch");
  return GadChannel(lambda, sigma, basis)(rho);
}

DensityMatrix gibbs_state(const SpectralDecomposition& h, double temperature) {
  if (!(temperature > 0.0)) throw Error("gibbs_state: temperature must be positive");
  const double e0 = h.eigenvalues.front();
  ComplexMatrix weights = h.apply_function([&](double e) { return std::exp(-(e - e0) / temperature); });
  const double z = weights.trace().real();
  return DensityMatrix::assume_valid(weights / z);
}

CycleOperators build_cycle(const CycleConfig& config) {
  config.validate();
  const auto uk = spin_propagator(config.compression(), config.d, config.propagator_steps, config.propagator_tol);
  const auto ue = spin_propagator(config.expansion(), config.d, config.propagator_steps, config.propagator_tol);
  return build_cycle(config, uk.unitary, ue.unitary);
}

CycleOperators build_cycle(const CycleConfig& config, const ComplexMatrix& U_k, const ComplexMatrix& U_e) {
  config.validate();
  if (U_k.rows() != config.d || U_e.rows() != config.d) throw Error("build_cycle: unitary dimension mismatch");
  const auto spin = spin_operators(config.d);
  const ComplexMatrix hk = config.omega_h * spin.sz;
  const ComplexMatrix he = config.omega_c * spin.sz;
  auto hk_dec = eig_hermitian(hk, config.grouping_tol);
  auto he_dec = eig_hermitian(he, config.grouping_tol);
  auto gh = gibbs_state(hk_dec, config.T_h);
  auto gc = gibbs_state(he_dec, config.T_c);
  GadChannel hot(config.lambda_h, gh, hk_dec);
  GadChannel cold(config.lambda_c, gc, he_dec);
  return CycleOperators{U_k, U_e, hk, he, std::move(hk_dec), std::move(he_dec), gh, gc, std::move(hot), std::move(cold)};
}

DensityMatrix cycle_map(const DensityMatrix& rho, const CycleOperators& ops) {
  if (rho.dim() != ops.U_k.rows()) throw Error("cycle_map: dimension mismatch");
  ComplexMatrix x = ops.unitary_k(rho.matrix());
  x = ops.hot.apply(x);
  x = ops.unitary_e(x);
  x = ops.cold.apply(x);
  return DensityMatrix::assume_valid(x);
}

const DensityMatrix& Corners::operator[](int corner) const {
  switch (corner) {
    case 1:
    case 5:
      return rho1;
    case 2:
      return rho2;
    case 3:
      return rho3;
    case 4:
      return rho4;
    default:
      throw Error("Corners: corner index must be in 1..5");
  }
}

Corners corners_from(const DensityMatrix& rho1, const CycleOperators& ops) {
  auto rho2 = DensityMatrix::assume_valid(ops.unitary_k(rho1.matrix()));
  auto rho3 = ops.hot(rho2);
  auto rho4 = DensityMatrix::assume_valid(ops.unitary_e(rho3.matrix()));
  const double residual = trace_distance(ops.cold(rho4), rho1);
  return Corners{rho1, rho2, rho3, rho4, 0, residual};
}

Corners limit_cycle(const CycleOperators& ops, const CycleConfig& config) {
  return limit_cycle(ops, config, DensityMatrix::maximally_mixed(config.d));
}

// Stops once successive iterates are closer than tol and the geometric
// estimate of the remaining distance to the fixed point is below tol as well
// (or the step has hit the round-off floor).
Corners limit_cycle(const CycleOperators& ops, const CycleConfig& config, const DensityMatrix& start) {
  const double tol = config.fixed_point_tol;
  const double slowest = std::min(config.lambda_h, config.lambda_c);
  const int cap = slowest < 1e-3 ? 1'000'000 : 100'000;
  const double floor = 0.1 * tol;

  DensityMatrix rho = start;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cap; ++it) {
    DensityMatrix next = cycle_map(rho, ops);
    const double diff = trace_distance(next, rho);
    rho = std::move(next);
    const double rate = diff / previous;
    previous = diff;
    if (diff >= tol) continue;
    const bool estimate_ok = rate < 1.0 && diff * rate / (1.0 - rate) < tol;
    if (diff <= floor || estimate_ok || diff == 0.0) {
      Corners c = corners_from(rho, ops);
      c.iterations = it;
      if (c.residual > 10.0 * tol) {
        std::ostringstream msg;
        msg << "limit_cycle: fixed-point residual " << c.residual << " exceeds " << 10.0 * tol;
        throw ConvergenceError(msg.str(), c.residual);
      }
      return c;
    }
  }
  std::ostringstream msg;
  msg << "limit_cycle: no convergence within " << cap << " iterations (last step " << previous << ")";
  throw ConvergenceError(msg.str(), previous);
}

Thermo unmeasured_thermo(const Corners& c, const CycleOperators& ops) {
  const double qh = (ops.H_k * (c.rho3.matrix() - c.rho2.matrix())).trace().real();
  const double qc = (ops.H_e * (c.rho1.matrix() - c.rho4.matrix())).trace().real();
  return {qh + qc, qh, qc};
}

Regime classify_regime(double w, double qh, double qc, double tol) {
  const bool hot_in = qh > tol;
  const bool hot_out = qh < -tol;
  const bool cold_out = qc < -tol;
  if (w > tol && hot_in && cold_out) return Regime::Engine;
  if (w < -tol && hot_in && cold_out) return Regime::Accelerator;
  if (w < -tol && hot_out && cold_out) return Regime::Heater;
  return Regime::Other;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Engine:
      return "Engine";
    case Regime::Accelerator:
      return "Accelerator";
    case Regime::Heater:
      return "Heater";
    case Regime::Other:
      break;
  }
  return "Other";
}

}  // namespace otto
