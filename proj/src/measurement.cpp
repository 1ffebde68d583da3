#include "otto/measurement.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace otto {

namespace {

constexpr double kNegativeTol = 1e-12;
constexpr double kBranchZero = 1e-14;
constexpr double kEquivalenceTol = 1e-9;
constexpr double kVarianceZero = 1e-14;

double tr(const ComplexMatrix& a, const ComplexMatrix& b) { return (a * b).trace().real(); }
double tr(const ComplexMatrix& a) { return a.trace().real(); }

double clamp_probability(double p) {
  if (p < -kNegativeTol) {
    std::ostringstream msg;
    msg << "outcome joint: probability " << p << " below " << -kNegativeTol;
    throw Error(msg.str());
  }
  return p < 0.0 ? 0.0 : p;
}

std::array<SpectralDecomposition, 5> energy_bases(const CycleOperators& ops) {
  return {ops.H_e_end, ops.H_k_end, ops.H_k_end, ops.H_e_end, ops.H_e_end};
}

// Eigen-branches of one corner state: outcome probabilities tr(P rho)
// and the post-measurement states P rho P / tr(P rho). Branches whose
// eigenvalue is below 1e-14 carry no weight and have no conditional state.
struct Branches {
  SpectralDecomposition dec;
  std::vector<double> prob;
  std::vector<ComplexMatrix> conditioned;
  std::vector<bool> live;

  std::size_t size() const { return prob.size(); }
};

Branches branches_of(const DensityMatrix& rho, double grouping_tol) {
  Branches b;
  b.dec = eig_hermitian(rho.matrix(), grouping_tol);
  for (std::size_t a = 0; a < b.dec.size(); ++a) {
    const auto& proj = b.dec.projectors[a];
    const bool live = b.dec.eigenvalues[a] >= kBranchZero;
    const ComplexMatrix post = proj * rho.matrix() * proj;
    const double p = live ? tr(post) : 0.0;
    b.prob.push_back(p);
    b.live.push_back(live);
    b.conditioned.push_back(live ? ComplexMatrix(post / p) : ComplexMatrix::Zero(rho.dim(), rho.dim()));
  }
  return b;
}

// K(a, b) = tr{P_to^b Map(sigma_from^a)}
template <class Map>
Eigen::MatrixXd transfer(const Branches& from, const Branches& to, Map&& map) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(from.size(), to.size());
  for (std::size_t a = 0; a < from.size(); ++a) {
    if (!from.live[a]) continue;
    const ComplexMatrix out = map(from.conditioned[a]);
    for (std::size_t b = 0; b < to.size(); ++b) k(a, b) = tr(to.dec.projectors[b], out);
  }
  return k;
}

// c(e | a) = tr[Π^e sigma^a]
Eigen::MatrixXd inferred(const Branches& from, const SpectralDecomposition& energy) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(from.size(), energy.size());
  for (std::size_t a = 0; a < from.size(); ++a) {
    if (!from.live[a]) continue;
    for (std::size_t e = 0; e < energy.size(); ++e) c(a, e) = tr(energy.projectors[e], from.conditioned[a]);
  }
  return c;
}

// Conditional first and second energy moments per branch.
std::pair<Eigen::VectorXd, Eigen::VectorXd> branch_energy(const Branches& b, const ComplexMatrix& h) {
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(b.size());
  const ComplexMatrix h2 = h * h;
  for (std::size_t a = 0; a < b.size(); ++a) {
    if (!b.live[a]) continue;
    m1(a) = tr(h, b.conditioned[a]);
    m2(a) = tr(h2, b.conditioned[a]);
  }
  return {m1, m2};
}

struct DbnChain {
  std::array<Branches, 4> corner;  // corners 1..4; the fifth measurement reuses corner 1
  Eigen::MatrixXd k12, k23, k34, k41;
  Eigen::VectorXd p1;
};

DbnChain dbn_chain(const Corners& c, const CycleOperators& ops) {
  const double tol = ops.H_k_end.grouping_tol;
  DbnChain ch{{branches_of(c.rho1, tol), branches_of(c.rho2, tol), branches_of(c.rho3, tol), branches_of(c.rho4, tol)},
              {}, {}, {}, {}, {}};
  ch.k12 = transfer(ch.corner[0], ch.corner[1], [&](const ComplexMatrix& x) { return ops.unitary_k(x); });
  ch.k23 = transfer(ch.corner[1], ch.corner[2], [&](const ComplexMatrix& x) { return ops.hot.apply(x); });
  ch.k34 = transfer(ch.corner[2], ch.corner[3], [&](const ComplexMatrix& x) { return ops.unitary_e(x); });
  ch.k41 = transfer(ch.corner[3], ch.corner[0], [&](const ComplexMatrix& x) { return ops.cold.apply(x); });
  ch.p1 = Eigen::Map<const Eigen::VectorXd>(ch.corner[0].prob.data(), ch.corner[0].prob.size());
  return ch;
}

}  // namespace

std::string_view to_string(Scheme s) { return s == Scheme::TPM ? "TPM" : "DBN"; }

double OutcomeJoint::total() const {
  double s = 0.0;
  for (double p : probabilities) s += p;
  return s;
}

OutcomeJoint tpm_joint(const Corners& c, const CycleOperators& ops) {
  OutcomeJoint out;
  out.scheme = Scheme::TPM;
  out.corner_bases = energy_bases(ops);
  for (int i = 0; i < 5; ++i) out.dims[i] = static_cast<int>(out.corner_bases[i].size());
  out.probabilities.assign(static_cast<std::size_t>(out.dims[0]) * out.dims[1] * out.dims[2] * out.dims[3] * out.dims[4],
                           0.0);
  const auto& pe = ops.H_e_end.projectors;
  const auto& pk = ops.H_k_end.projectors;
  const ComplexMatrix& rho1 = c.rho1.matrix();
  for (int j = 0; j < out.dims[0]; ++j) {
    const ComplexMatrix y1 = ops.unitary_k(pe[j] * rho1 * pe[j]);
    for (int l = 0; l < out.dims[1]; ++l) {
      const ComplexMatrix y2 = ops.hot.apply(pk[l] * y1 * pk[l]);
      for (int m = 0; m < out.dims[2]; ++m) {
        const ComplexMatrix y3 = ops.unitary_e(pk[m] * y2 * pk[m]);
        for (int n = 0; n < out.dims[3]; ++n) {
          const ComplexMatrix y4 = ops.cold.apply(pe[n] * y3 * pe[n]);
          for (int r = 0; r < out.dims[4]; ++r) out.at(j, l, m, n, r) = clamp_probability(tr(pe[r], y4));
        }
      }
    }
  }
  return out;
}

OutcomeJoint dbn_joint(const Corners& c, const CycleOperators& ops) {
  OutcomeJoint out;
  out.scheme = Scheme::DBN;
  out.corner_bases = energy_bases(ops);
  for (int i = 0; i < 5; ++i) out.dims[i] = static_cast<int>(out.corner_bases[i].size());
  const auto ch = dbn_chain(c, ops);
  const Eigen::MatrixXd c1 = inferred(ch.corner[0], ops.H_e_end);
  const Eigen::MatrixXd c2 = inferred(ch.corner[1], ops.H_k_end);
  const Eigen::MatrixXd c3 = inferred(ch.corner[2], ops.H_k_end);
  const Eigen::MatrixXd c4 = inferred(ch.corner[3], ops.H_e_end);
  const int na = static_cast<int>(ch.corner[0].size()), nb = static_cast<int>(ch.corner[1].size());
  const int ng = static_cast<int>(ch.corner[2].size()), nd = static_cast<int>(ch.corner[3].size());
  const auto [dj, dl, dm, dn, dr] = out.dims;

  // Contract the chain one corner at a time, keeping the energy indices
  // already fixed on the left and the current branch index on the right.
  std::vector<double> s1(static_cast<std::size_t>(dj) * nb, 0.0);  // (j, β)
  for (int j = 0; j < dj; ++j)
    for (int b = 0; b < nb; ++b) {
      double acc = 0.0;
      for (int a = 0; a < na; ++a) acc += ch.p1(a) * c1(a, j) * ch.k12(a, b);
      s1[j * nb + b] = acc;
    }
  std::vector<double> s2(static_cast<std::size_t>(dj) * dl * ng, 0.0);  // (j, l, γ)
  for (int j = 0; j < dj; ++j)
    for (int l = 0; l < dl; ++l)
      for (int g = 0; g < ng; ++g) {
        double acc = 0.0;
        for (int b = 0; b < nb; ++b) acc += s1[j * nb + b] * c2(b, l) * ch.k23(b, g);
        s2[(j * dl + l) * ng + g] = acc;
      }
  std::vector<double> s3(static_cast<std::size_t>(dj) * dl * dm * nd, 0.0);  // (j, l, m, δ)
  for (int jl = 0; jl < dj * dl; ++jl)
    for (int m = 0; m < dm; ++m)
      for (int d = 0; d < nd; ++d) {
        double acc = 0.0;
        for (int g = 0; g < ng; ++g) acc += s2[jl * ng + g] * c3(g, m) * ch.k34(g, d);
        s3[(jl * dm + m) * nd + d] = acc;
      }
  std::vector<double> s4(static_cast<std::size_t>(dj) * dl * dm * dn * na, 0.0);  // (j, l, m, n, ε)
  for (int jlm = 0; jlm < dj * dl * dm; ++jlm)
    for (int n = 0; n < dn; ++n)
      for (int e = 0; e < na; ++e) {
        double acc = 0.0;
        for (int d = 0; d < nd; ++d) acc += s3[jlm * nd + d] * c4(d, n) * ch.k41(d, e);
        s4[(jlm * dn + n) * na + e] = acc;
      }
  out.probabilities.assign(static_cast<std::size_t>(dj) * dl * dm * dn * dr, 0.0);
  for (int jlmn = 0; jlmn < dj * dl * dm * dn; ++jlmn)
    for (int r = 0; r < dr; ++r) {
      double acc = 0.0;
      for (int e = 0; e < na; ++e) acc += s4[jlmn * na + e] * c1(e, r);
      out.probabilities[static_cast<std::size_t>(jlmn) * dr + r] = clamp_probability(acc);
    }
  return out;
}

OutcomeJoint outcome_joint(Scheme scheme, const Corners& corners, const CycleOperators& ops) {
  return scheme == Scheme::TPM ? tpm_joint(corners, ops) : dbn_joint(corners, ops);
}

Marginals marginals(const OutcomeJoint& joint) {
  const auto [dj, dl, dm, dn, dr] = joint.dims;
  Marginals out;
  out.w_dims = {dj, dl, dm, dn};
  out.corner_bases = joint.corner_bases;
  out.p_w.assign(static_cast<std::size_t>(dj) * dl * dm * dn, 0.0);
  out.p_qh = Eigen::MatrixXd::Zero(dl, dm);
  out.p_qc = Eigen::MatrixXd::Zero(dn, dr);
  for (int j = 0; j < dj; ++j)
    for (int l = 0; l < dl; ++l)
      for (int m = 0; m < dm; ++m)
        for (int n = 0; n < dn; ++n)
          for (int r = 0; r < dr; ++r) {
            const double p = joint.at(j, l, m, n, r);
            out.p_w[((static_cast<std::size_t>(j) * dl + l) * dm + m) * dn + n] += p;
            out.p_qh(l, m) += p;
            out.p_qc(n, r) += p;
          }
  return out;
}

DiscreteDistribution value_distribution(Quantity kind, const Marginals& mg, double merge_tol) {
  const auto& e1 = mg.corner_bases[0].eigenvalues;
  const auto& e2 = mg.corner_bases[1].eigenvalues;
  const auto& e3 = mg.corner_bases[2].eigenvalues;
  const auto& e4 = mg.corner_bases[3].eigenvalues;
  const auto& e5 = mg.corner_bases[4].eigenvalues;
  std::vector<Atom> samples;
  switch (kind) {
    case Quantity::Work:
      for (int j = 0; j < mg.w_dims[0]; ++j)
        for (int l = 0; l < mg.w_dims[1]; ++l)
          for (int m = 0; m < mg.w_dims[2]; ++m)
            for (int n = 0; n < mg.w_dims[3]; ++n)
              samples.push_back({-((e2[l] - e1[j]) + (e4[n] - e3[m])), mg.w_at(j, l, m, n)});
      break;
    case Quantity::HeatHot:
      for (int l = 0; l < mg.p_qh.rows(); ++l)
        for (int m = 0; m < mg.p_qh.cols(); ++m) samples.push_back({e3[m] - e2[l], mg.p_qh(l, m)});
      break;
    case Quantity::HeatCold:
      for (int n = 0; n < mg.p_qc.rows(); ++n)
        for (int r = 0; r < mg.p_qc.cols(); ++r) samples.push_back({e5[r] - e4[n], mg.p_qc(n, r)});
      break;
  }
  return DiscreteDistribution::from_samples(std::move(samples), merge_tol);
}

SchemeDistributions scheme_distributions(const Marginals& mg, double merge_tol) {
  return {value_distribution(Quantity::Work, mg, merge_tol), value_distribution(Quantity::HeatHot, mg, merge_tol),
          value_distribution(Quantity::HeatCold, mg, merge_tol)};
}

double SchemeReport::max_closed_form_gap() const {
  const double gaps[] = {std::abs(mean_w - closed_form_mean_w),   std::abs(var_w - closed_form_var_w),
                         std::abs(mean_qh - closed_form_mean_qh), std::abs(var_qh - closed_form_var_qh),
                         std::abs(mean_qc - closed_form_mean_qc), std::abs(var_qc - closed_form_var_qc)};
  double m = 0.0;
  for (double g : gaps) m = std::max(m, g);
  return m;
}

namespace {

void fill_distribution_moments(SchemeReport& rep, const SchemeDistributions& d) {
  const auto w = moments(d.work);
  const auto qh = moments(d.heat_h);
  const auto qc = moments(d.heat_c);
  rep.mean_w = w.mean;
  rep.var_w = w.variance;
  rep.mean_qh = qh.mean;
  rep.var_qh = qh.variance;
  rep.mean_qc = qc.mean;
  rep.var_qc = qc.variance;
}

void tpm_closed_form(SchemeReport& rep, const Corners& c, const CycleOperators& ops, FaultInjection fault) {
  const ComplexMatrix& E = ops.H_e;
  const ComplexMatrix& K = ops.H_k;
  const ComplexMatrix E2 = E * E;
  const ComplexMatrix K2 = K * K;
  const ComplexMatrix& R = c.rho1.matrix();
  const bool skip = fault == FaultInjection::SkipInitialDephasing;
  auto De = [&](const ComplexMatrix& x) { return dephase_matrix(x, ops.H_e_end); };
  auto Dk = [&](const ComplexMatrix& x) { return dephase_matrix(x, ops.H_k_end); };
  auto first = [&](const ComplexMatrix& x) { return skip ? x : De(x); };
  auto Uk = [&](const ComplexMatrix& x) { return ops.unitary_k(x); };
  auto Ue = [&](const ComplexMatrix& x) { return ops.unitary_e(x); };
  auto Th = [&](const ComplexMatrix& x) { return ops.hot.apply(x); };
  auto Tc = [&](const ComplexMatrix& x) { return ops.cold.apply(x); };

  const ComplexMatrix A = Uk(first(R));  // U_k D_e(rho1)
  const ComplexMatrix B = Th(A);         // T_h U_k D_e(rho1)
  const ComplexMatrix C = Ue(Dk(B));     // U_e D_k T_h U_k D_e(rho1)
  const ComplexMatrix F = Tc(C);         // T_c U_e D_k T_h U_k D_e(rho1)

  const double kA = tr(K, A), kB = tr(K, B), eC = tr(E, C), eF = tr(E, F), eR = tr(E, R);
  rep.closed_form_mean_qh = kB - kA;
  rep.closed_form_mean_qc = eF - eC;
  rep.closed_form_mean_w = kB - kA + eR - eC;
  rep.first_law_residual = tr(E, R - F);

  rep.closed_form_var_qh = tr(K2, B) - kB * kB + tr(K2, A) - kA * kA + 2.0 * kB * kA - 2.0 * tr(K, Th(K * A));
  rep.closed_form_var_qc = tr(E2, F) - eF * eF + tr(E2, C) - eC * eC + 2.0 * eF * eC - 2.0 * tr(E, Tc(E * C));

  // Work variance from the measurement chain with energy insertions:
  // <f1(x_j) f2(y_l) f3(y_m) f4(x_n)> = tr[F4 U_e D_k(F3 T_h D_k(F2 U_k D_e(F1 rho1)))].
  const ComplexMatrix I = ComplexMatrix::Identity(E.rows(), E.cols());
  auto chain = [&](const ComplexMatrix& f1, const ComplexMatrix& f2, const ComplexMatrix& f3, const ComplexMatrix& f4) {
    ComplexMatrix x = Uk(first(f1 * R));
    x = Th(Dk(f2 * x));
    x = Ue(Dk(f3 * x));
    return tr(f4, x);
  };
  const std::array<const ComplexMatrix*, 4> h = {&E, &K, &K, &E};
  const std::array<double, 4> sign = {1.0, -1.0, 1.0, -1.0};
  double second = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int k = i; k < 4; ++k) {
      std::array<ComplexMatrix, 4> f = {I, I, I, I};
      f[i] = *h[i];
      f[k] = (i == k) ? ComplexMatrix(*h[i] * *h[i]) : *h[k];
      const double term = chain(f[0], f[1], f[2], f[3]);
      second += (i == k ? 1.0 : 2.0) * sign[i] * sign[k] * term;
    }
  }
  rep.closed_form_var_w = second - rep.closed_form_mean_w * rep.closed_form_mean_w;

  // Expanded form, evaluated term by term.
  const double qh = rep.closed_form_mean_qh, qc = rep.closed_form_mean_qc;
  const double dev = rep.first_law_residual;
  const double dev2 = tr(E2, R - F);
  const ComplexMatrix ER = E * R;
  rep.expanded_var_w = rep.closed_form_var_qh + rep.closed_form_var_qc + (dev2 - dev * dev) +
                      tr(Th(Uk(first(E2 * R)))) - tr(E2, R) - 2.0 * qh * qc - 2.0 * (qh + qc) * dev +
                      2.0 * tr(E, Tc(E * C)) + 2.0 * tr(E, Ue(Dk(Th(K * A)))) + 2.0 * tr(K, Th(Uk(first(ER)))) -
                      2.0 * tr(E, Ue(Dk(Th(Uk(first(ER)))))) - 2.0 * tr(E, Ue(Dk(E * B))) -
                      2.0 * tr(K, Uk(first(ER)));
}

void dbn_closed_form(SchemeReport& rep, const Corners& c, const CycleOperators& ops) {
  const ComplexMatrix& E = ops.H_e;
  const ComplexMatrix& K = ops.H_k;
  const ComplexMatrix E2 = E * E;
  const ComplexMatrix K2 = K * K;
  const auto ch = dbn_chain(c, ops);
  const auto [h1, h1sq] = branch_energy(ch.corner[0], E);
  const auto [h2, h2sq] = branch_energy(ch.corner[1], K);
  const auto [h3, h3sq] = branch_energy(ch.corner[2], K);
  const auto [h4, h4sq] = branch_energy(ch.corner[3], E);
  const auto vec = [](const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); };
  const Eigen::VectorXd p2 = vec(ch.corner[1].prob), p3 = vec(ch.corner[2].prob), p4 = vec(ch.corner[3].prob);

  const double e1 = tr(E, c.rho1.matrix()), k2 = tr(K, c.rho2.matrix());
  const double k3 = tr(K, c.rho3.matrix()), e4 = tr(E, c.rho4.matrix());
  rep.closed_form_mean_qh = k3 - k2;
  rep.closed_form_mean_qc = e1 - e4;
  rep.closed_form_mean_w = k3 - k2 + e1 - e4;
  rep.first_law_residual = tr(E, c.rho1.matrix() - ops.cold.apply(c.rho4.matrix()));

  // Joint branch weights of neighbouring corners, e.g. tr[P3 T_h(P2 rho2 P2)].
  const Eigen::MatrixXd j12 = ch.p1.asDiagonal() * ch.k12;
  const Eigen::MatrixXd j23 = p2.asDiagonal() * ch.k23;
  const Eigen::MatrixXd j34 = p3.asDiagonal() * ch.k34;
  const Eigen::MatrixXd j41 = p4.asDiagonal() * ch.k41;

  const double cov23 = h2.dot(j23 * h3);
  const double cov41 = h4.dot(j41 * h1);
  rep.closed_form_var_qh = tr(K2, c.rho3.matrix()) - k3 * k3 + tr(K2, c.rho2.matrix()) - k2 * k2 + 2.0 * k3 * k2 -
                           2.0 * cov23;
  rep.closed_form_var_qc = tr(E2, c.rho1.matrix()) - e1 * e1 + tr(E2, c.rho4.matrix()) - e4 * e4 + 2.0 * e1 * e4 -
                           2.0 * cov41;

  const double x1x4 = h1.dot(j12 * ch.k23 * ch.k34 * h4);
  const double y2x4 = h2.dot(j23 * ch.k34 * h4);
  const double x1y3 = h1.dot(j12 * ch.k23 * h3);
  const double x1y2 = h1.dot(j12 * h2);
  const double y3x4 = h3.dot(j34 * h4);
  const double qh = rep.closed_form_mean_qh, qc = rep.closed_form_mean_qc;
  rep.expanded_var_w = rep.closed_form_var_qh + rep.closed_form_var_qc - 2.0 * qh * qc + 2.0 * cov41 - 2.0 * x1x4 +
                      2.0 * y2x4 + 2.0 * x1y3 - 2.0 * x1y2 - 2.0 * y3x4;
  rep.closed_form_var_w = rep.expanded_var_w;
}

}  // namespace

SchemeReport closed_form_report(Scheme scheme, const Corners& corners, const CycleOperators& ops,
                                const SchemeDistributions& dists, FaultInjection fault) {
  SchemeReport rep;
  rep.scheme = scheme;
  fill_distribution_moments(rep, dists);
  if (scheme == Scheme::TPM)
    tpm_closed_form(rep, corners, ops, fault);
  else
    dbn_closed_form(rep, corners, ops);
  return rep;
}

SchemeReport closed_form_report(Scheme scheme, const Corners& corners, const CycleOperators& ops, double merge_tol,
                                FaultInjection fault) {
  const auto dists = scheme_distributions(marginals(outcome_joint(scheme, corners, ops)), merge_tol);
  return closed_form_report(scheme, corners, ops, dists, fault);
}

DensityMatrix avg_post_measurement_state(Scheme scheme, const Corners& c, const CycleOperators& ops,
                                         FaultInjection fault) {
  std::array<SpectralDecomposition, 4> basis;
  if (scheme == Scheme::TPM) {
    basis = {ops.H_e_end, ops.H_k_end, ops.H_k_end, ops.H_e_end};
  } else {
    const double tol = ops.H_k_end.grouping_tol;
    basis = {eig_hermitian(c.rho1.matrix(), tol), eig_hermitian(c.rho2.matrix(), tol),
             eig_hermitian(c.rho3.matrix(), tol), eig_hermitian(c.rho4.matrix(), tol)};
  }
  const bool skip = scheme == Scheme::TPM && fault == FaultInjection::SkipInitialDephasing;
  ComplexMatrix x = skip ? c.rho1.matrix() : dephase_matrix(c.rho1.matrix(), basis[0]);
  x = dephase_matrix(ops.unitary_k(x), basis[1]);
  x = dephase_matrix(ops.hot.apply(x), basis[2]);
  x = dephase_matrix(ops.unitary_e(x), basis[3]);
  x = dephase_matrix(ops.cold.apply(x), basis[0]);
  return DensityMatrix::assume_valid(x);
}

EquivalenceCheck check_equivalence_conditions(const CycleOperators& ops, const std::vector<DensityMatrix>& probes) {
  double worst = 0.0;
  for (const auto& rho : probes) {
    const ComplexMatrix a = ops.unitary_k(dephase_matrix(rho.matrix(), ops.H_e_end));
    worst = std::max(worst, max_abs(a - dephase_matrix(a, ops.H_k_end)));
    const ComplexMatrix b = ops.unitary_e(dephase_matrix(rho.matrix(), ops.H_k_end));
    worst = std::max(worst, max_abs(b - dephase_matrix(b, ops.H_e_end)));
  }
  return {worst < kEquivalenceTol, worst};
}

std::vector<DensityMatrix> default_probe_states(const CycleOperators& ops, unsigned seed) {
  std::vector<DensityMatrix> probes;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto* basis : {&ops.H_e_end, &ops.H_k_end}) {
    for (const auto& p : basis->projectors) probes.push_back(DensityMatrix::assume_valid(p / p.trace().real()));
    for (int k = 0; k < 10; ++k) {
      ComplexMatrix mix = ComplexMatrix::Zero(basis->dim(), basis->dim());
      double total = 0.0;
      for (const auto& p : basis->projectors) {
        const double w = unit(rng);
        mix += w * p;
        total += w * p.trace().real();
      }
      probes.push_back(DensityMatrix::assume_valid(mix / total));
    }
  }
  return probes;
}

EquivalenceCheck check_equivalence_conditions(const CycleOperators& ops) {
  return check_equivalence_conditions(ops, default_probe_states(ops));
}

FluctuationRatio fluctuation_ratio(double var_w, double var_qh, double T_h, double T_c) {
  const double eta_c = 1.0 - T_c / T_h;
  FluctuationRatio out{std::nullopt, eta_c * eta_c, false};
  if (var_qh < kVarianceZero) return out;
  out.eta2 = var_w / var_qh;
  out.violated = *out.eta2 > out.bound;
  return out;
}

FluctuationRatio fluctuation_ratio(const SchemeReport& report, const CycleConfig& config) {
  return fluctuation_ratio(report.var_w, report.var_qh, config.T_h, config.T_c);
}

}  // namespace otto
