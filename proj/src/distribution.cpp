#include "otto/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "otto/qcore.hpp"

namespace otto {

namespace {

constexpr double kNormTol = 1e-10;

void require_normalized(const DiscreteDistribution& d, const char* name) {
  if (std::abs(d.total() - 1.0) > kNormTol)
    throw Error(std::string("kl_divergence: distribution ") + name + " is not normalized");
}

}  // namespace

DiscreteDistribution DiscreteDistribution::from_samples(std::vector<Atom> samples, double merge_tol) {
  std::stable_sort(samples.begin(), samples.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  DiscreteDistribution out;
  out.merge_tol_ = merge_tol;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i + 1;
    while (j < samples.size() && samples[j].value - samples[j - 1].value <= merge_tol) ++j;
    double mass = 0.0;
    double sum = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      mass += samples[k].probability;
      sum += samples[k].value;
    }
    out.atoms_.push_back({sum / static_cast<double>(j - i), mass});
    i = j;
  }
  return out;
}

double DiscreteDistribution::total() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.probability;
  return s;
}

Moments moments(const DiscreteDistribution& dist) {
  double mean = 0.0;
  for (const auto& a : dist.atoms()) mean += a.value * a.probability;
  double var = 0.0;
  for (const auto& a : dist.atoms()) var += (a.value - mean) * (a.value - mean) * a.probability;
  return {mean, var};
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_normalized(p, "P");
  require_normalized(q, "Q");
  const double tol = std::max(p.merge_tol(), q.merge_tol());
  const auto& pa = p.atoms();
  const auto& qa = q.atoms();
  double sum = 0.0;
  std::size_t k = 0;
  for (const auto& atom : pa) {
    if (atom.probability <= 0.0) continue;
    while (k < qa.size() && qa[k].value < atom.value - tol) ++k;
    double mass = 0.0;
    for (std::size_t m = k; m < qa.size() && qa[m].value <= atom.value + tol; ++m) mass += qa[m].probability;
    if (mass <= 0.0) return std::numeric_limits<double>::infinity();
    sum += atom.probability * std::log(atom.probability / mass);
  }
  return std::max(sum, 0.0);
}

}  // namespace otto
