#include "drofa/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "drofa/errors.hpp"
#include "drofa/rng.hpp"

namespace drofa {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// per-sample loss, excluding the l2 term
double sample_loss(const ObjectiveSpec& obj, std::size_t client,
                   const Vec& w, const Vec& x, double y) {
  switch (obj.kind) {
    case ObjectiveKind::quadratic: {
      const Vec& c = obj.centers.at(client);
      double s = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        double d = w[k] - c[k];
        s += d * d;
      }
      return 0.5 * obj.curvature * s;
    }
    case ObjectiveKind::logistic_regression: {
      if (obj.n_classes <= 2) {
        double margin = (2.0 * y - 1.0) * dot(w, x);
        // log(1 + exp(-margin)), overflow-safe
        return margin > 0.0 ? std::log1p(std::exp(-margin))
                            : -margin + std::log1p(std::exp(margin));
      }
      const std::size_t d = x.size();
      const int C = obj.n_classes;
      double zmax = -1e300;
      std::vector<double> z(C);
      for (int c = 0; c < C; ++c) {
        z[c] = std::inner_product(x.begin(), x.end(), w.begin() + c * d, 0.0);
        zmax = std::max(zmax, z[c]);
      }
      double lse = 0.0;
      for (int c = 0; c < C; ++c) lse += std::exp(z[c] - zmax);
      return zmax + std::log(lse) - z[static_cast<int>(y)];
    }
    case ObjectiveKind::sigmoid_nonconvex: {
      double s = sigmoid(dot(w, x));
      return (s - y) * (s - y);
    }
  }
  return 0.0;
}

void sample_grad_accum(const ObjectiveSpec& obj, std::size_t client,
                       const Vec& w, const Vec& x, double y, Vec& out) {
  switch (obj.kind) {
    case ObjectiveKind::quadratic: {
      const Vec& c = obj.centers.at(client);
      for (std::size_t k = 0; k < w.size(); ++k)
        out[k] += obj.curvature * (w[k] - c[k]);
      return;
    }
    case ObjectiveKind::logistic_regression: {
      if (obj.n_classes <= 2) {
        double ypm = 2.0 * y - 1.0;
        double coeff = -ypm * sigmoid(-ypm * dot(w, x));
        for (std::size_t k = 0; k < x.size(); ++k) out[k] += coeff * x[k];
        return;
      }
      const std::size_t d = x.size();
      const int C = obj.n_classes;
      std::vector<double> z(C);
      double zmax = -1e300;
      for (int c = 0; c < C; ++c) {
        z[c] = std::inner_product(x.begin(), x.end(), w.begin() + c * d, 0.0);
        zmax = std::max(zmax, z[c]);
      }
      double denom = 0.0;
      for (int c = 0; c < C; ++c) denom += std::exp(z[c] - zmax);
      for (int c = 0; c < C; ++c) {
        double p = std::exp(z[c] - zmax) / denom;
        double coeff = p - (c == static_cast<int>(y) ? 1.0 : 0.0);
        for (std::size_t k = 0; k < d; ++k) out[c * d + k] += coeff * x[k];
      }
      return;
    }
    case ObjectiveKind::sigmoid_nonconvex: {
      double s = sigmoid(dot(w, x));
      double coeff = 2.0 * (s - y) * s * (1.0 - s);
      for (std::size_t k = 0; k < x.size(); ++k) out[k] += coeff * x[k];
      return;
    }
  }
}

const ClientShard& shard_at(const Federation& fed, std::size_t i) {
  if (i >= fed.shards.size())
    throw BadIndex("client " + std::to_string(i) + " of " +
                   std::to_string(fed.shards.size()));
  return fed.shards[i];
}

}  // namespace

std::size_t Federation::model_dim() const {
  std::size_t d = feature_dim();
  if (objective.kind == ObjectiveKind::logistic_regression &&
      objective.n_classes > 2)
    return d * static_cast<std::size_t>(objective.n_classes);
  if (objective.kind == ObjectiveKind::quadratic && !objective.centers.empty())
    return objective.centers.front().size();
  return d;
}

RegularizerSpec RegularizerSpec::quadratic(double mu) {
  if (!(mu > 0.0)) throw BadConfig("quadratic regularizer strength must be > 0");
  return {RegularizerKind::quadratic_to_uniform, mu};
}

RegularizerSpec RegularizerSpec::kl(double rho) {
  if (!(rho > 0.0)) throw BadConfig("kl regularizer strength must be > 0");
  return {RegularizerKind::kl_to_uniform, rho};
}

double eval_loss(const Federation& fed, std::size_t i, const Vec& w) {
  const ClientShard& sh = shard_at(fed, i);
  Vec per(sh.size());
  for (std::size_t k = 0; k < sh.size(); ++k)
    per[k] = sample_loss(fed.objective, i, w, sh.features[k], sh.labels[k]);
  double mean = compensated_sum(per) / static_cast<double>(sh.size());
  double l2 = 0.5 * fed.objective.l2_term * dot(w, w);
  double v = mean + l2;
  if (!std::isfinite(v)) throw NonFiniteLoss();
  return v;
}

double eval_loss(const Federation& fed, std::size_t i, const Vec& w,
                 std::span<const std::size_t> batch) {
  const ClientShard& sh = shard_at(fed, i);
  if (batch.empty()) throw BadIndex("empty batch");
  double s = 0.0;
  for (std::size_t k : batch) {
    if (k >= sh.size()) throw BadIndex("batch index " + std::to_string(k));
    s += sample_loss(fed.objective, i, w, sh.features[k], sh.labels[k]);
  }
  double v = s / static_cast<double>(batch.size()) +
             0.5 * fed.objective.l2_term * dot(w, w);
  if (!std::isfinite(v)) throw NonFiniteLoss();
  return v;
}

namespace {

Vec grad_impl(const Federation& fed, std::size_t i, const Vec& w,
              std::span<const std::size_t> batch) {
  const ClientShard& sh = shard_at(fed, i);
  Vec g(w.size(), 0.0);
  for (std::size_t k : batch) {
    if (k >= sh.size()) throw BadIndex("batch index " + std::to_string(k));
    sample_grad_accum(fed.objective, i, w, sh.features[k], sh.labels[k], g);
  }
  scale_inplace(g, 1.0 / static_cast<double>(batch.size()));
  axpy(fed.objective.l2_term, w, g);
  if (!all_finite(g)) throw NonFiniteGradient();
  return g;
}

}  // namespace

Vec eval_grad(const Federation& fed, std::size_t i, const Vec& w) {
  const ClientShard& sh = shard_at(fed, i);
  std::vector<std::size_t> all(sh.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return grad_impl(fed, i, w, all);
}

Vec eval_grad(const Federation& fed, std::size_t i, const Vec& w,
              std::span<const std::size_t> batch) {
  if (batch.empty()) throw BadIndex("empty batch");
  return grad_impl(fed, i, w, batch);
}

int predict_class(const ObjectiveSpec& obj, const Vec& w, const Vec& x) {
  switch (obj.kind) {
    case ObjectiveKind::logistic_regression: {
      if (obj.n_classes <= 2) return dot(w, x) >= 0.0 ? 1 : 0;
      const std::size_t d = x.size();
      int best = 0;
      double bz = -1e300;
      for (int c = 0; c < obj.n_classes; ++c) {
        double z =
            std::inner_product(x.begin(), x.end(), w.begin() + c * d, 0.0);
        if (z > bz) {
          bz = z;
          best = c;
        }
      }
      return best;
    }
    case ObjectiveKind::sigmoid_nonconvex:
      return sigmoid(dot(w, x)) >= 0.5 ? 1 : 0;
    default:
      throw WrongObjectiveKind("classification prediction on quadratic");
  }
}

RegularizerEval eval_regularizer(const RegularizerSpec& g,
                                 const MixtureWeights& lambda) {
  const std::size_t n = lambda.size();
  RegularizerEval out{0.0, Vec(n, 0.0)};
  switch (g.kind) {
    case RegularizerKind::none:
      return out;
    case RegularizerKind::quadratic_to_uniform: {
      const double u = 1.0 / static_cast<double>(n);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = lambda[i] - u;
        s += d * d;
        out.grad[i] = -g.strength * d;
      }
      out.value = -0.5 * g.strength * s;
      return out;
    }
    case RegularizerKind::kl_to_uniform: {
      const double N = static_cast<double>(n);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (lambda[i] <= 0.0) throw BoundaryKL();
        s += lambda[i] * std::log(N * lambda[i]);
        out.grad[i] = -g.strength * (std::log(N * lambda[i]) + 1.0);
      }
      out.value = -g.strength * s;
      return out;
    }
  }
  return out;
}

Federation make_synthetic_federation(const SyntheticSpec& spec,
                                     std::uint64_t seed) {
  if (spec.n_clients < 1 || spec.dim < 1 || spec.samples_per_client < 1)
    throw BadConfig("synthetic federation needs n_clients, dim, samples >= 1");
  int C = spec.n_classes > 0
              ? spec.n_classes
              : static_cast<int>(std::min<std::size_t>(spec.n_clients, 10));
  if (C < 2) C = 2;

  // cluster means: points on a circle of radius cluster_radius in the
  // first two coordinates (evenly spaced endpoints on a segment for d=1)
  std::vector<Vec> means(C, Vec(spec.dim, 0.0));
  for (int c = 0; c < C; ++c) {
    if (spec.dim == 1) {
      means[c][0] = spec.cluster_radius *
                    (C == 1 ? 0.0 : 2.0 * c / static_cast<double>(C - 1) - 1.0);
    } else {
      double ang = 2.0 * 3.14159265358979323846 * c / static_cast<double>(C);
      means[c][0] = spec.cluster_radius * std::cos(ang);
      means[c][1] = spec.cluster_radius * std::sin(ang);
    }
  }

  Federation fed;
  fed.objective = spec.objective;
  if (fed.objective.kind == ObjectiveKind::logistic_regression)
    fed.objective.n_classes = C;
  fed.shards.resize(spec.n_clients);
  for (std::size_t i = 0; i < spec.n_clients; ++i) {
    RngStream rng(seed, StreamPurpose::data_gen, 0, i);
    ClientShard& sh = fed.shards[i];
    sh.client_id = static_cast<int>(i);
    sh.features.reserve(spec.samples_per_client);
    sh.labels.reserve(spec.samples_per_client);
    int own = static_cast<int>(i) % C;
    for (std::size_t k = 0; k < spec.samples_per_client; ++k) {
      int c = own;
      if (spec.heterogeneity == Heterogeneity::mixed &&
          rng.next_double() < spec.mix_alpha)
        c = static_cast<int>(rng.next_below(C));
      Vec x(spec.dim);
      for (std::size_t j = 0; j < spec.dim; ++j)
        x[j] = means[c][j] + spec.noise_std * rng.next_normal();
      sh.features.push_back(std::move(x));
      sh.labels.push_back(static_cast<double>(c));
    }
  }
  return fed;
}

Federation make_quadratic_federation(const std::vector<Vec>& centers,
                                     double curvature, double l2_term) {
  if (centers.empty()) throw BadConfig("need at least one center");
  if (!(curvature > 0.0)) throw BadConfig("curvature must be > 0");
  Federation fed;
  fed.objective.kind = ObjectiveKind::quadratic;
  fed.objective.curvature = curvature;
  fed.objective.l2_term = l2_term;
  fed.objective.centers = centers;
  std::size_t d = centers.front().size();
  fed.shards.resize(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].size() != d) throw DimensionMismatch(d, centers[i].size());
    fed.shards[i].client_id = static_cast<int>(i);
    fed.shards[i].features = {Vec(d, 0.0)};  // placeholder sample
    fed.shards[i].labels = {0.0};
  }
  return fed;
}

Federation load_csv_federation(const std::string& path, const CsvSpec& spec) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && spec.has_header) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const char* s = cell.c_str();
      char* end = nullptr;
      double v = std::strtod(s, &end);
      while (end && *end == ' ') ++end;
      if (end == s || (end && *end != '\0'))
        throw ParseError(lineno, "non-numeric cell '" + cell + "'");
      row.push_back(v);
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError(lineno, "ragged row: expected " +
                                   std::to_string(width) + " cells");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in " + path);

  int label_col = spec.label_column >= 0 ? spec.label_column
                                         : static_cast<int>(width) - 1;
  int part_col = spec.partition == CsvPartition::by_label
                     ? label_col
                     : spec.partition_column;
  if (label_col < 0 || label_col >= static_cast<int>(width) || part_col < 0 ||
      part_col >= static_cast<int>(width))
    throw BadConfig("column index out of range");

  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < rows.size(); ++r)
    groups[rows[r][part_col]].push_back(r);

  Federation fed;
  std::map<double, int> label_ids;
  for (const auto& row : rows) label_ids.emplace(row[label_col], 0);
  int next_id = 0;
  for (auto& [lab, id] : label_ids) id = next_id++;

  int cid = 0;
  for (const auto& [key, idxs] : groups) {
    if (idxs.empty()) throw EmptyPartition(std::to_string(key));
    ClientShard sh;
    sh.client_id = cid++;
    for (std::size_t r : idxs) {
      Vec x;
      for (std::size_t c = 0; c < width; ++c) {
        if (static_cast<int>(c) == label_col) continue;
        if (spec.partition == CsvPartition::by_column &&
            static_cast<int>(c) == part_col)
          continue;
        x.push_back(rows[r][c]);
      }
      sh.features.push_back(std::move(x));
      sh.labels.push_back(
          static_cast<double>(label_ids.at(rows[r][label_col])));
    }
    fed.shards.push_back(std::move(sh));
  }
  fed.objective.kind = ObjectiveKind::logistic_regression;
  fed.objective.n_classes = static_cast<int>(label_ids.size());
  return fed;
}

}  // namespace drofa
