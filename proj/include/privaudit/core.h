//
// Copyright 2026 The privaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Algebra of priors, channels and hyper-distributions over finite domains,
// together with the vulnerability and degradation measures built on them.
//
// Everything is templated on the scalar type:
//   - Rational: exact arithmetic. This is the default path; when the record
//     prior is uniform every quantity is a ratio of integer counts and all
//     equalities hold exactly.
//   - double: floating-point path for non-uniform (explicit) priors, with a
//     1e-9 normalization tolerance and a 1e-12 point-mass tolerance.
//
// All types are immutable after construction and safe to share across
// threads; the operations are pure functions.

#ifndef PRIVAUDIT_CORE_H_
#define PRIVAUDIT_CORE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "privaudit/rational.h"

namespace privaudit {

// Scalar-dependent policy: exactness, normalization checks, count ratios.
template <typename S>
struct ScalarPolicy;

template <>
struct ScalarPolicy<Rational> {
  static constexpr bool kExact = true;
  static Rational Zero() { return Rational(); }
  static Rational One() { return Rational(1); }
  static Rational Ratio(std::uint64_t num, std::uint64_t den) {
    return Rational::FromCounts(num, den);
  }
  static bool IsZero(const Rational& v) { return v.is_zero(); }
  static bool IsOne(const Rational& v) { return v.is_one(); }
  static bool NonNegative(const Rational& v) { return !v.is_negative(); }
  static bool SumsToOne(const Rational& v) { return v.is_one(); }
  // Exact arithmetic admits no rounding, so a point mass is exactly 1.
  static bool IsPointMassMax(const Rational& v) { return v.is_one(); }
  static bool InUnitInterval(const Rational& v) {
    return !v.is_negative() && v <= Rational(1);
  }
};

template <>
struct ScalarPolicy<double> {
  static constexpr bool kExact = false;
  static constexpr double kSumTolerance = 1e-9;
  static constexpr double kPointMassTolerance = 1e-12;
  static double Zero() { return 0.0; }
  static double One() { return 1.0; }
  static double Ratio(std::uint64_t num, std::uint64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static bool IsZero(double v) { return v == 0.0; }
  static bool IsOne(double v) { return v == 1.0; }
  static bool NonNegative(double v) { return v >= 0.0; }
  static bool SumsToOne(double v) { return std::abs(v - 1.0) <= kSumTolerance; }
  static bool IsPointMassMax(double v) { return v >= 1.0 - kPointMassTolerance; }
  static bool InUnitInterval(double v) { return v >= 0.0 && v <= 1.0; }
};

namespace internal {

inline void CheckUniqueLabels(const std::vector<std::string>& labels,
                              const char* what) {
  std::unordered_set<std::string> seen;
  seen.reserve(labels.size());
  for (const auto& l : labels) {
    if (!seen.insert(l).second)
      throw std::invalid_argument(std::string("duplicate ") + what +
                                  " label: " + l);
  }
}

}  // namespace internal

// A probability vector over a finite, labeled domain. Masses are
// non-negative and sum to one (exactly for Rational, within 1e-9 for
// double); labels are unique.
template <typename S>
class Distribution {
 public:
  Distribution(std::vector<std::string> labels, std::vector<S> mass)
      : labels_(std::move(labels)), mass_(std::move(mass)) {
    if (labels_.size() != mass_.size())
      throw std::invalid_argument("distribution label/mass size mismatch");
    if (labels_.empty()) throw std::invalid_argument("empty distribution");
    internal::CheckUniqueLabels(labels_, "domain");
    S sum = ScalarPolicy<S>::Zero();
    for (const S& m : mass_) {
      if (!ScalarPolicy<S>::NonNegative(m))
        throw std::invalid_argument("negative probability mass");
      sum = sum + m;
    }
    if (!ScalarPolicy<S>::SumsToOne(sum))
      throw std::invalid_argument("distribution does not sum to 1");
  }

  static Distribution Uniform(std::vector<std::string> labels) {
    if (labels.empty()) throw std::invalid_argument("empty distribution");
    const std::uint64_t n = labels.size();
    std::vector<S> mass(labels.size(), ScalarPolicy<S>::Ratio(1, n));
    return Distribution(std::move(labels), std::move(mass));
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<S>& mass() const { return mass_; }
  std::size_t size() const { return labels_.size(); }

  std::optional<std::size_t> IndexOf(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<S> mass_;
};

// Co-occurrence counts of secret values (rows) and observation values
// (columns), in number of records. The root object from which joint,
// prior, channel and hyper all derive.
struct JointCounts {
  std::vector<std::string> secret_labels;
  std::vector<std::string> obs_labels;
  std::vector<std::vector<std::uint64_t>> counts;  // secret-major

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
      for (std::uint64_t c : row) t += c;
    return t;
  }
};

// Joint probability of (secret, observation) pairs.
template <typename S>
class JointDistribution {
 public:
  JointDistribution(std::vector<std::string> secret_labels,
                    std::vector<std::string> obs_labels,
                    std::vector<std::vector<S>> probs)
      : secret_labels_(std::move(secret_labels)),
        obs_labels_(std::move(obs_labels)),
        probs_(std::move(probs)) {
    if (secret_labels_.empty() || obs_labels_.empty())
      throw std::invalid_argument("empty joint");
    if (probs_.size() != secret_labels_.size())
      throw std::invalid_argument("joint row count mismatch");
    internal::CheckUniqueLabels(secret_labels_, "secret");
    internal::CheckUniqueLabels(obs_labels_, "observation");
    S sum = ScalarPolicy<S>::Zero();
    for (const auto& row : probs_) {
      if (row.size() != obs_labels_.size())
        throw std::invalid_argument("joint column count mismatch");
      for (const S& p : row) {
        if (!ScalarPolicy<S>::NonNegative(p))
          throw std::invalid_argument("negative joint probability");
        sum = sum + p;
      }
    }
    if (!ScalarPolicy<S>::SumsToOne(sum))
      throw std::invalid_argument("joint does not sum to 1");
  }

  const std::vector<std::string>& secret_labels() const {
    return secret_labels_;
  }
  const std::vector<std::string>& obs_labels() const { return obs_labels_; }
  const std::vector<std::vector<S>>& probs() const { return probs_; }

 private:
  std::vector<std::string> secret_labels_;
  std::vector<std::string> obs_labels_;
  std::vector<std::vector<S>> probs_;
};

// Row-stochastic map from secret values to distributions over observations.
template <typename S>
class Channel {
 public:
  Channel(std::vector<std::string> secret_labels,
          std::vector<std::string> obs_labels,
          std::vector<std::vector<S>> rows)
      : secret_labels_(std::move(secret_labels)),
        obs_labels_(std::move(obs_labels)),
        rows_(std::move(rows)) {
    if (secret_labels_.empty() || obs_labels_.empty())
      throw std::invalid_argument("empty channel");
    if (rows_.size() != secret_labels_.size())
      throw std::invalid_argument("channel row count mismatch");
    internal::CheckUniqueLabels(secret_labels_, "secret");
    internal::CheckUniqueLabels(obs_labels_, "observation");
    for (const auto& row : rows_) {
      if (row.size() != obs_labels_.size())
        throw std::invalid_argument("channel column count mismatch");
      S sum = ScalarPolicy<S>::Zero();
      for (const S& p : row) {
        if (!ScalarPolicy<S>::InUnitInterval(p))
          throw std::invalid_argument("channel entry outside [0,1]");
        sum = sum + p;
      }
      if (!ScalarPolicy<S>::SumsToOne(sum))
        throw std::invalid_argument("channel row does not sum to 1");
    }
  }

  const std::vector<std::string>& secret_labels() const {
    return secret_labels_;
  }
  const std::vector<std::string>& obs_labels() const { return obs_labels_; }
  const std::vector<std::vector<S>>& rows() const { return rows_; }

 private:
  std::vector<std::string> secret_labels_;
  std::vector<std::string> obs_labels_;
  std::vector<std::vector<S>> rows_;
};

// Outer distribution over observations together with one posterior
// distribution over secrets per observation. Observations with zero outer
// probability are omitted entirely.
template <typename S>
struct Hyper {
  std::vector<std::string> secret_labels;
  std::vector<std::string> obs_labels;        // nonzero-outer observations
  std::vector<S> outer;                       // parallel to obs_labels
  std::vector<std::vector<S>> posteriors;     // per observation, over secrets
};

// Adversary utility per (guess, secret) pair. The identity gain (1 iff the
// guess equals the secret) recovers Bayes vulnerability.
template <typename S>
class GainFunction {
 public:
  GainFunction(std::vector<std::string> guess_labels,
               std::vector<std::string> secret_labels,
               std::vector<std::vector<S>> gains)
      : guess_labels_(std::move(guess_labels)),
        secret_labels_(std::move(secret_labels)),
        gains_(std::move(gains)) {
    if (guess_labels_.empty() || secret_labels_.empty())
      throw std::invalid_argument("empty gain function");
    if (gains_.size() != guess_labels_.size())
      throw std::invalid_argument("gain row count mismatch");
    internal::CheckUniqueLabels(guess_labels_, "guess");
    internal::CheckUniqueLabels(secret_labels_, "secret");
    for (const auto& row : gains_) {
      if (row.size() != secret_labels_.size())
        throw std::invalid_argument("gain column count mismatch");
      if constexpr (!ScalarPolicy<S>::kExact) {
        for (const S& g : row)
          if (!std::isfinite(g))
            throw std::invalid_argument("non-finite gain entry");
      }
    }
  }

  static GainFunction Identity(std::vector<std::string> secret_labels) {
    const std::size_t n = secret_labels.size();
    std::vector<std::vector<S>> gains(
        n, std::vector<S>(n, ScalarPolicy<S>::Zero()));
    for (std::size_t i = 0; i < n; ++i) gains[i][i] = ScalarPolicy<S>::One();
    std::vector<std::string> guesses = secret_labels;
    return GainFunction(std::move(guesses), std::move(secret_labels),
                        std::move(gains));
  }

  GainFunction Scaled(const S& factor) const {
    std::vector<std::vector<S>> gains = gains_;
    for (auto& row : gains)
      for (S& g : row) g = g * factor;
    return GainFunction(guess_labels_, secret_labels_, std::move(gains));
  }

  const std::vector<std::string>& guess_labels() const {
    return guess_labels_;
  }
  const std::vector<std::string>& secret_labels() const {
    return secret_labels_;
  }
  const std::vector<std::vector<S>>& gains() const { return gains_; }

 private:
  std::vector<std::string> guess_labels_;
  std::vector<std::string> secret_labels_;
  std::vector<std::vector<S>> gains_;
};

// --- Operations -----------------------------------------------------------

// Normalizes co-occurrence counts into a joint distribution, assuming the
// uniform distribution on records. probs[x][y] = counts[x][y] / total.
template <typename S>
JointDistribution<S> JointFromCounts(const JointCounts& counts) {
  const std::uint64_t total = counts.total();
  if (counts.secret_labels.empty() || counts.obs_labels.empty() || total == 0)
    throw std::invalid_argument("empty joint");
  std::vector<std::vector<S>> probs;
  probs.reserve(counts.counts.size());
  for (const auto& row : counts.counts) {
    std::vector<S> out;
    out.reserve(row.size());
    for (std::uint64_t c : row) out.push_back(ScalarPolicy<S>::Ratio(c, total));
    probs.push_back(std::move(out));
  }
  return JointDistribution<S>(counts.secret_labels, counts.obs_labels,
                              std::move(probs));
}

// Marginalizes the joint over observations: prior(x) = sum_y joint(x, y).
template <typename S>
Distribution<S> PriorFromJoint(const JointDistribution<S>& joint) {
  std::vector<S> mass;
  mass.reserve(joint.probs().size());
  for (const auto& row : joint.probs()) {
    S sum = ScalarPolicy<S>::Zero();
    for (const S& p : row) sum = sum + p;
    mass.push_back(sum);
  }
  return Distribution<S>(joint.secret_labels(), std::move(mass));
}

// Conditions the joint on the prior: rows[x](y) = joint(x,y) / prior(x).
// Secret values with zero prior mass have no conditional row and are
// removed from the channel's secret domain. `prior` must be the marginal of
// `joint`.
template <typename S>
Channel<S> ChannelFromJoint(const JointDistribution<S>& joint,
                            const Distribution<S>& prior) {
  if (prior.labels() != joint.secret_labels())
    throw std::invalid_argument("prior domain does not match joint");
  {
    const Distribution<S> marginal = PriorFromJoint(joint);
    for (std::size_t i = 0; i < prior.size(); ++i) {
      const S diff = prior.mass()[i] - marginal.mass()[i];
      const S abs_diff = ScalarPolicy<S>::NonNegative(diff) ? diff : -diff;
      bool mismatch;
      if constexpr (ScalarPolicy<S>::kExact) {
        mismatch = !ScalarPolicy<S>::IsZero(abs_diff);
      } else {
        mismatch = abs_diff > ScalarPolicy<S>::kSumTolerance;
      }
      if (mismatch)
        throw std::invalid_argument("prior is not the marginal of the joint");
    }
  }
  std::vector<std::string> secrets;
  std::vector<std::vector<S>> rows;
  for (std::size_t x = 0; x < joint.secret_labels().size(); ++x) {
    const S& px = prior.mass()[x];
    if (ScalarPolicy<S>::IsZero(px)) continue;  // no occurring records
    std::vector<S> row;
    row.reserve(joint.obs_labels().size());
    for (const S& p : joint.probs()[x]) row.push_back(p / px);
    secrets.push_back(joint.secret_labels()[x]);
    rows.push_back(std::move(row));
  }
  if (secrets.empty()) throw std::invalid_argument("no support");
  return Channel<S>(std::move(secrets), joint.obs_labels(), std::move(rows));
}

// Prior and channel derived from one joint, with zero-mass secrets dropped
// from both so that their domains agree. `dropped_secrets` records the
// removed labels so callers can log the drop.
template <typename S>
struct PriorChannel {
  Distribution<S> prior;
  Channel<S> channel;
  std::vector<std::string> dropped_secrets;
};

template <typename S>
PriorChannel<S> DecomposeJoint(const JointDistribution<S>& joint) {
  const Distribution<S> full_prior = PriorFromJoint(joint);
  Channel<S> channel = ChannelFromJoint(joint, full_prior);
  std::vector<std::string> dropped;
  if (channel.secret_labels().size() == full_prior.size()) {
    return PriorChannel<S>{full_prior, std::move(channel), std::move(dropped)};
  }
  std::vector<S> mass;
  std::size_t keep = 0;
  for (std::size_t x = 0; x < full_prior.size(); ++x) {
    if (keep < channel.secret_labels().size() &&
        channel.secret_labels()[keep] == full_prior.labels()[x]) {
      mass.push_back(full_prior.mass()[x]);
      ++keep;
    } else {
      dropped.push_back(full_prior.labels()[x]);
    }
  }
  Distribution<S> prior(channel.secret_labels(), std::move(mass));
  return PriorChannel<S>{std::move(prior), std::move(channel),
                         std::move(dropped)};
}

// Pushes the prior through the channel:
//   outer(y)       = sum_x prior(x) * C[x](y)
//   posterior_y(x) = prior(x) * C[x](y) / outer(y)
// Observations with outer(y) = 0 are omitted.
template <typename S>
Hyper<S> HyperFrom(const Distribution<S>& prior, const Channel<S>& channel) {
  if (prior.labels() != channel.secret_labels())
    throw std::invalid_argument("prior domain does not match channel");
  const std::size_t nx = prior.size();
  const std::size_t ny = channel.obs_labels().size();
  Hyper<S> hyper;
  hyper.secret_labels = prior.labels();
  for (std::size_t y = 0; y < ny; ++y) {
    S outer = ScalarPolicy<S>::Zero();
    std::vector<S> column(nx, ScalarPolicy<S>::Zero());
    for (std::size_t x = 0; x < nx; ++x) {
      column[x] = prior.mass()[x] * channel.rows()[x][y];
      outer = outer + column[x];
    }
    if (ScalarPolicy<S>::IsZero(outer)) continue;
    for (S& p : column) p = p / outer;
    hyper.obs_labels.push_back(channel.obs_labels()[y]);
    hyper.outer.push_back(outer);
    hyper.posteriors.push_back(std::move(column));
  }
  return hyper;
}

// max_x d(x): the probability of guessing the secret right in one try.
template <typename S>
S BayesVulnerability(const Distribution<S>& d) {
  S best = d.mass()[0];
  for (const S& m : d.mass())
    if (best < m) best = m;
  return best;
}

// Closed form of BayesVulnerability for a uniform prior over n values.
// Used where materializing a distribution over tens of millions of records
// would be pointless.
inline Rational UniformPriorVulnerability(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty domain");
  return Rational::FromCounts(1, n);
}

// sum_y outer(y) * max_x posterior_y(x).
template <typename S>
S PosteriorBayesVulnerability(const Hyper<S>& h) {
  S total = ScalarPolicy<S>::Zero();
  for (std::size_t y = 0; y < h.outer.size(); ++y) {
    S best = h.posteriors[y][0];
    for (const S& p : h.posteriors[y])
      if (best < p) best = p;
    total = total + h.outer[y] * best;
  }
  return total;
}

// max_w sum_x prior(x) * g(w, x): expected utility of the best guess.
template <typename S>
S GVulnerability(const Distribution<S>& prior, const GainFunction<S>& g) {
  if (g.secret_labels() != prior.labels())
    throw std::invalid_argument("gain domain does not match prior");
  bool first = true;
  S best = ScalarPolicy<S>::Zero();
  for (const auto& row : g.gains()) {
    S expected = ScalarPolicy<S>::Zero();
    for (std::size_t x = 0; x < prior.size(); ++x)
      expected = expected + prior.mass()[x] * row[x];
    if (first || best < expected) {
      best = expected;
      first = false;
    }
  }
  return best;
}

// sum_y outer(y) * GVulnerability(posterior_y, g).
template <typename S>
S PosteriorGVulnerability(const Hyper<S>& h, const GainFunction<S>& g) {
  if (g.secret_labels() != h.secret_labels)
    throw std::invalid_argument("gain domain does not match hyper");
  S total = ScalarPolicy<S>::Zero();
  for (std::size_t y = 0; y < h.outer.size(); ++y) {
    bool first = true;
    S best = ScalarPolicy<S>::Zero();
    for (const auto& row : g.gains()) {
      S expected = ScalarPolicy<S>::Zero();
      for (std::size_t x = 0; x < h.posteriors[y].size(); ++x)
        expected = expected + h.posteriors[y][x] * row[x];
      if (first || best < expected) {
        best = expected;
        first = false;
      }
    }
    total = total + h.outer[y] * best;
  }
  return total;
}

// Outer mass of the observations whose posterior is a point mass, i.e. the
// fraction of records whose secret the adversary infers with certainty.
template <typename S>
S DeterministicSuccess(const Hyper<S>& h) {
  S total = ScalarPolicy<S>::Zero();
  for (std::size_t y = 0; y < h.outer.size(); ++y) {
    S best = h.posteriors[y][0];
    for (const S& p : h.posteriors[y])
      if (best < p) best = p;
    if (ScalarPolicy<S>::IsPointMassMax(best)) total = total + h.outer[y];
  }
  return total;
}

// 1 if the prior itself is a point mass, else 0.
template <typename S>
S DeterministicPriorSuccess(const Distribution<S>& d) {
  return ScalarPolicy<S>::IsPointMassMax(BayesVulnerability(d))
             ? ScalarPolicy<S>::One()
             : ScalarPolicy<S>::Zero();
}

enum class DegradationMode { kAdditive, kMultiplicative };

// post - prior, or post / prior. The multiplicative ratio against a zero
// prior is undefined and reported as nullopt; output writers serialize it
// as null, never as an infinity.
template <typename S>
std::optional<S> Degradation(const S& prior, const S& post,
                             DegradationMode mode) {
  if (!ScalarPolicy<S>::NonNegative(prior) || !ScalarPolicy<S>::NonNegative(post))
    throw std::invalid_argument("negative vulnerability");
  if (mode == DegradationMode::kAdditive) return post - prior;
  if (ScalarPolicy<S>::IsZero(prior)) return std::nullopt;
  return post / prior;
}

}  // namespace privaudit

#endif  // PRIVAUDIT_CORE_H_
