// Per-user strategy estimates, their clustering into behavioural classes and
// the structural profile of each class.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socnet/generator.hpp"
#include "socnet/likelihood.hpp"
#include "socnet/netstate.hpp"

namespace socnet {

struct UserFit {
  UserId user = 0;
  std::size_t n_links = 0;
  StrategyMix mix;
  double loglik = 0.0;
};

struct UserFitOptions {
  std::size_t min_links = 20;
  Mechanism shortcut = Mechanism::Shortcut;
  GridOptions grid;  // grid.threads is used across users
};

struct UserFits {
  std::vector<UserFit> fits;  // sorted by user id
  std::size_t skipped_users = 0;
};

/// Fits the shortcut + triadic + random model to each creator's links
/// independently. Users with fewer than min_links Follow events are skipped.
UserFits fit_users(std::span<const LinkContext> contexts, const UserFitOptions& options = {});

struct UserClass {
  std::string label;
  StrategyMix mean_mix;  // average over members
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // mixture component mean
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  double weight = 0.0;
  std::vector<UserId> members;
};

/// How the class count is picked from the cross-validation scores.
///   MaxMean:  the k with the best mean held-out log-likelihood.
///   OneSE:    the smallest k whose score is within one standard error
///             (across folds) of the best.
enum class KRule : std::uint8_t { MaxMean, OneSE };

std::string_view to_string(KRule r);
KRule parse_k_rule(std::string_view s);

struct ClusterOptions {
  int k_min = 1;
  int k_max = 8;
  int folds = 10;
  int restarts = 5;
  std::uint64_t seed = 1;
  double ridge = 1e-6;
  int max_iter = 500;
  unsigned threads = 1;
  KRule k_rule = KRule::OneSE;
};

struct Clustering {
  int k = 0;
  std::vector<int> k_values;
  std::vector<double> cv_score;   // mean held-out log-likelihood per point, per k
  std::vector<double> cv_se;      // standard error of the per-fold means
  std::vector<UserClass> classes; // ordered by decreasing center p_traffic
  std::vector<int> assignment;    // class index per input fit
  Eigen::MatrixXd responsibilities;
  std::vector<double> objective_trace;  // final model, per EM iteration
  bool degenerate = false;
};

/// Gaussian mixture over (p_traffic, p_structure). The number of classes is
/// picked from the mean held-out log-likelihood across folds by `k_rule`;
/// the final model is the best of `restarts` EM runs on all fits.
/// Requires at least 10 fits.
Clustering cluster_users(std::span<const UserFit> fits, const ClusterOptions& options = {});

/// Names classes after the nearest of the five reference behaviour profiles
/// (Info, Friend, CFrd, Mix, Rand) when there are exactly five, otherwise
/// "class1", "class2", ...
void label_classes(std::vector<UserClass>& classes);

struct FeatureSummary {
  std::string feature;
  BoxStats stats;
};

struct ClassProfile {
  std::string label;
  std::size_t members = 0;
  bool low_confidence = false;  // fewer than 2 members
  std::vector<FeatureSummary> features;
};

/// Per-user features used by class_profiles, in the order: lifetime,
/// in_degree, in_degree_ratio, times_reposted, posts, post_ratio.
std::vector<std::string> profile_feature_names();
std::vector<double> user_features(const NetworkState& state, UserId u);

std::vector<ClassProfile> class_profiles(const std::vector<UserClass>& classes, const NetworkState& state);

}  // namespace socnet
