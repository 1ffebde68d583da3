#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace otto {

constexpr double kDefaultMergeTol = 1e-9;

struct Atom {
  double value;
  double probability;
};

// Finite distribution over real values. Atoms are kept sorted by value and
// pairwise separated by more than merge_tol.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  // Merges values closer than merge_tol (single linkage on sorted values).
  // A merged atom sits at the plain mean of its member values, so the support
  // depends only on the values and not on their probabilities. Zero-mass
  // atoms are kept.
  static DiscreteDistribution from_samples(std::vector<Atom> samples, double merge_tol = kDefaultMergeTol);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double merge_tol() const { return merge_tol_; }
  double total() const;
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<Atom> atoms_;
  double merge_tol_ = kDefaultMergeTol;
};

struct Moments {
  double mean;
  double variance;
};

Moments moments(const DiscreteDistribution& dist);

// Σ p ln(p/q) after aligning supports within the larger of the two merge
// tolerances. Returns +infinity when p > 0 on an atom where q is 0 or absent.
// Throws Error when either input is not normalized to 1e-10.
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

inline bool is_kl_infinite(double kl) { return kl == std::numeric_limits<double>::infinity(); }

}  // namespace otto
