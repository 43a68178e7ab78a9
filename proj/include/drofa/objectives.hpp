#ifndef DROFA_OBJECTIVES_HPP
#define DROFA_OBJECTIVES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drofa/domain.hpp"
#include "drofa/vec.hpp"

namespace drofa {

struct ClientShard {
  std::vector<Vec> features;  // n_i rows of dimension d
  Vec labels;                 // class index or real target per row
  int client_id = 0;

  std::size_t size() const { return features.size(); }
  std::size_t feature_dim() const {
    return features.empty() ? 0 : features.front().size();
  }
};

enum class ObjectiveKind { logistic_regression, quadratic, sigmoid_nonconvex };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::logistic_regression;
  double l2_term = 0.0;
  // quadratic kind: f_i(w) = (curvature/2)||w - centers[i]||^2
  double curvature = 1.0;
  std::vector<Vec> centers;
  // logistic kind: binary for n_classes == 2, softmax heads otherwise
  int n_classes = 2;
};

enum class RegularizerKind { none, quadratic_to_uniform, kl_to_uniform };

struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::none;
  double strength = 0.0;  // mu_lambda for quadratic, rho for KL

  static RegularizerSpec none() { return {}; }
  static RegularizerSpec quadratic(double mu);
  static RegularizerSpec kl(double rho);
};

struct Federation {
  std::vector<ClientShard> shards;
  ObjectiveSpec objective;

  std::size_t n_clients() const { return shards.size(); }
  std::size_t feature_dim() const {
    return shards.empty() ? 0 : shards.front().feature_dim();
  }
  // dimension of the primal variable (n_classes * d for softmax heads)
  std::size_t model_dim() const;
};

// Batch-mean local loss. The overload without indices evaluates the FULL
// shard with compensated summation.
double eval_loss(const Federation& fed, std::size_t i, const Vec& w);
double eval_loss(const Federation& fed, std::size_t i, const Vec& w,
                 std::span<const std::size_t> batch);

Vec eval_grad(const Federation& fed, std::size_t i, const Vec& w);
Vec eval_grad(const Federation& fed, std::size_t i, const Vec& w,
              std::span<const std::size_t> batch);

// Predicted class index for one sample (classification kinds only).
int predict_class(const ObjectiveSpec& obj, const Vec& w, const Vec& x);

struct RegularizerEval {
  double value;
  Vec grad;
};

// g(lambda) anchored at the uniform distribution, so g(uniform) = 0 and
// g <= 0 for both supported kinds.
RegularizerEval eval_regularizer(const RegularizerSpec& g,
                                 const MixtureWeights& lambda);

enum class Heterogeneity { one_class_per_client, mixed };

struct SyntheticSpec {
  std::size_t n_clients = 1;
  std::size_t dim = 2;
  std::size_t samples_per_client = 32;
  Heterogeneity heterogeneity = Heterogeneity::one_class_per_client;
  double mix_alpha = 0.0;  // mixed: probability of drawing a foreign cluster
  int n_classes = 0;       // 0: min(n_clients, 10)
  double cluster_radius = 3.0;
  double noise_std = 1.0;
  ObjectiveSpec objective;
};

Federation make_synthetic_federation(const SyntheticSpec& spec,
                                     std::uint64_t seed);

// Equal-curvature quadratic federation with one sample per client; the
// standard strongly-convex test problem.
Federation make_quadratic_federation(const std::vector<Vec>& centers,
                                     double curvature, double l2_term = 0.0);

enum class CsvPartition { by_label, by_column };

struct CsvSpec {
  CsvPartition partition = CsvPartition::by_label;
  int partition_column = -1;  // by_column only
  int label_column = -1;      // -1: last column
  bool has_header = false;
};

Federation load_csv_federation(const std::string& path, const CsvSpec& spec);

}  // namespace drofa

#endif
