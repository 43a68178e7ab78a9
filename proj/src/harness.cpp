#include "drofa/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "drofa/errors.hpp"

namespace drofa {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

const std::map<std::string, std::string> kAliases = {
    {"learning_rate_w", "eta"},   {"learning_rate", "eta"},
    {"lr", "eta"},                {"primal_step", "eta"},
    {"learning_rate_lambda", "gamma"}, {"dual_step", "gamma"},
    {"sync_gap", "tau"},          {"iterations", "T"},
    {"total_iterations", "T"},    {"clients", "n_clients"},
    {"batch_size", "batch_primal"},
};

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      auto alias = kAliases.find(it.key());
      std::string reason = "unknown key";
      if (alias != kAliases.end())
        reason += "; did you mean '" + alias->second + "'?";
      throw SchemaError(where.empty() ? it.key() : where + "." + it.key(),
                        reason);
    }
  }
}

double get_num(const json& obj, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number()) throw SchemaError(key, "expected a number");
  return obj[key].get<double>();
}

long get_int(const json& obj, const std::string& key, long dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_integer()) throw SchemaError(key, "expected an integer");
  return obj[key].get<long>();
}

std::string get_str(const json& obj, const std::string& key,
                    const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_string()) throw SchemaError(key, "expected a string");
  return obj[key].get<std::string>();
}

PrimalDomainSpec parse_domain(const json& j) {
  if (j.is_string()) {
    if (j == "unconstrained") return PrimalDomainSpec::unconstrained();
    throw SchemaError("primal_domain", "expected 'unconstrained' or {\"l2_ball\": r}");
  }
  if (j.is_object() && j.contains("l2_ball"))
    return PrimalDomainSpec::l2_ball(j["l2_ball"].get<double>());
  throw SchemaError("primal_domain", "expected 'unconstrained' or {\"l2_ball\": r}");
}

RegularizerSpec parse_regularizer(const json& j) {
  if (j.is_string()) {
    if (j == "none") return RegularizerSpec::none();
    throw SchemaError("regularizer",
                      "expected 'none', {\"quadratic\": mu} or {\"kl\": rho}");
  }
  if (j.is_object()) {
    if (j.contains("quadratic"))
      return RegularizerSpec::quadratic(j["quadratic"].get<double>());
    if (j.contains("kl")) return RegularizerSpec::kl(j["kl"].get<double>());
  }
  throw SchemaError("regularizer",
                    "expected 'none', {\"quadratic\": mu} or {\"kl\": rho}");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "drfa") return Algorithm::drfa;
  if (s == "drfa_prox") return Algorithm::drfa_prox;
  if (s == "drfa_ga") return Algorithm::drfa_ga;
  if (s == "fedavg") return Algorithm::fedavg;
  throw SchemaError("algorithm", "unknown algorithm '" + s + "'");
}

json domain_to_json(const PrimalDomainSpec& d) {
  if (d.kind == PrimalDomainKind::unconstrained) return "unconstrained";
  return json{{"l2_ball", d.radius}};
}

json regularizer_to_json(const RegularizerSpec& g) {
  switch (g.kind) {
    case RegularizerKind::none:
      return "none";
    case RegularizerKind::quadratic_to_uniform:
      return json{{"quadratic", g.strength}};
    case RegularizerKind::kl_to_uniform:
      return json{{"kl", g.strength}};
  }
  return "none";
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("<root>", "expected a JSON object");
  check_keys(root,
             {"name", "federation", "algo", "seeds", "eval_every",
              "output_dir", "preset", "eval_samples_per_client"},
             "");

  ExperimentConfig cfg;
  cfg.name = get_str(root, "name", cfg.name);

  {
    const json f = root.contains("federation") ? root["federation"]
                                               : json::object();
    check_keys(f,
               {"type", "n_clients", "dim", "samples_per_client",
                "heterogeneity", "mix_alpha", "n_classes", "cluster_radius",
                "noise_std", "objective", "l2_term", "path", "partition",
                "partition_column", "label_column", "has_header", "centers",
                "curvature"},
               "federation");
    std::string type = get_str(f, "type", "synthetic");
    if (type == "synthetic") {
      cfg.federation.source = FederationSource::synthetic;
      SyntheticSpec& s = cfg.federation.synthetic;
      s.n_clients = static_cast<std::size_t>(get_int(f, "n_clients", 1));
      s.dim = static_cast<std::size_t>(get_int(f, "dim", 2));
      s.samples_per_client =
          static_cast<std::size_t>(get_int(f, "samples_per_client", 32));
      std::string het = get_str(f, "heterogeneity", "one_class_per_client");
      if (het == "one_class_per_client")
        s.heterogeneity = Heterogeneity::one_class_per_client;
      else if (het == "mixed")
        s.heterogeneity = Heterogeneity::mixed;
      else
        throw SchemaError("federation.heterogeneity", "unknown value");
      s.mix_alpha = get_num(f, "mix_alpha", 0.0);
      s.n_classes = static_cast<int>(get_int(f, "n_classes", 0));
      s.cluster_radius = get_num(f, "cluster_radius", 3.0);
      s.noise_std = get_num(f, "noise_std", 1.0);
      std::string obj = get_str(f, "objective", "logistic");
      if (obj == "logistic")
        s.objective.kind = ObjectiveKind::logistic_regression;
      else if (obj == "sigmoid")
        s.objective.kind = ObjectiveKind::sigmoid_nonconvex;
      else
        throw SchemaError("federation.objective",
                          "synthetic supports 'logistic' or 'sigmoid'");
      s.objective.l2_term = get_num(f, "l2_term", 0.0);
    } else if (type == "csv") {
      cfg.federation.source = FederationSource::csv;
      cfg.federation.csv_path = get_str(f, "path", "");
      if (cfg.federation.csv_path.empty())
        throw SchemaError("federation.path", "required for csv federations");
      std::string part = get_str(f, "partition", "by_label");
      if (part == "by_label")
        cfg.federation.csv.partition = CsvPartition::by_label;
      else if (part == "by_column")
        cfg.federation.csv.partition = CsvPartition::by_column;
      else
        throw SchemaError("federation.partition", "unknown value");
      cfg.federation.csv.partition_column =
          static_cast<int>(get_int(f, "partition_column", -1));
      cfg.federation.csv.label_column =
          static_cast<int>(get_int(f, "label_column", -1));
      if (f.contains("has_header"))
        cfg.federation.csv.has_header = f["has_header"].get<bool>();
    } else if (type == "quadratic") {
      cfg.federation.source = FederationSource::quadratic;
      if (!f.contains("centers"))
        throw SchemaError("federation.centers", "required for quadratic");
      for (const auto& row : f["centers"])
        cfg.federation.centers.push_back(row.get<Vec>());
      cfg.federation.curvature = get_num(f, "curvature", 1.0);
      cfg.federation.l2_term = get_num(f, "l2_term", 0.0);
    } else {
      throw SchemaError("federation.type", "unknown value '" + type + "'");
    }
  }

  {
    const json a = root.contains("algo") ? root["algo"] : json::object();
    check_keys(a,
               {"algorithm", "T", "tau", "m", "eta", "gamma", "batch_primal",
                "batch_probe", "primal_domain", "regularizer", "output_mode",
                "ga_grad_at", "w0", "lambda0"},
               "algo");
    cfg.algo.algorithm = parse_algorithm(get_str(a, "algorithm", "drfa"));
    cfg.algo.T = get_int(a, "T", 100);
    cfg.algo.tau = get_int(a, "tau", 1);
    cfg.algo.m = static_cast<std::size_t>(get_int(a, "m", 1));
    cfg.algo.eta = get_num(a, "eta", 0.1);
    cfg.algo.gamma = get_num(a, "gamma", 0.01);
    cfg.algo.batch_primal =
        static_cast<std::size_t>(get_int(a, "batch_primal", 1));
    cfg.algo.batch_probe =
        static_cast<std::size_t>(get_int(a, "batch_probe", 1));
    if (a.contains("primal_domain"))
      cfg.algo.primal_domain = parse_domain(a["primal_domain"]);
    if (a.contains("regularizer"))
      cfg.algo.regularizer = parse_regularizer(a["regularizer"]);
    std::string om = get_str(a, "output_mode", "averaged");
    if (om == "averaged")
      cfg.algo.output_mode = OutputMode::averaged;
    else if (om == "last_iterate")
      cfg.algo.output_mode = OutputMode::last_iterate;
    else if (om == "tail_averaged")
      cfg.algo.output_mode = OutputMode::tail_averaged;
    else
      throw SchemaError("algo.output_mode", "unknown value");
    std::string ga = get_str(a, "ga_grad_at", "stage_start");
    if (ga == "stage_start")
      cfg.algo.ga_grad_at = GaGradAt::stage_start;
    else if (ga == "stage_end")
      cfg.algo.ga_grad_at = GaGradAt::stage_end;
    else
      throw SchemaError("algo.ga_grad_at", "unknown value");
    if (a.contains("w0")) cfg.algo.w0 = a["w0"].get<Vec>();
    if (a.contains("lambda0")) cfg.algo.lambda0 = a["lambda0"].get<Vec>();
  }

  if (root.contains("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : root["seeds"])
      cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  if (cfg.seeds.empty()) throw SchemaError("seeds", "must be nonempty");
  cfg.eval_every = get_int(root, "eval_every", 1);
  if (cfg.eval_every < 1) throw SchemaError("eval_every", "must be >= 1");
  cfg.output_dir = get_str(root, "output_dir", cfg.output_dir);
  std::string preset = get_str(root, "preset", "none");
  if (preset == "none")
    cfg.preset = Preset::none;
  else if (preset == "theorem1")
    cfg.preset = Preset::theorem1;
  else if (preset == "theorem2_appendix")
    cfg.preset = Preset::theorem2_appendix;
  else
    throw SchemaError("preset", "unknown value '" + preset + "'");
  cfg.eval_samples_per_client =
      static_cast<std::size_t>(get_int(root, "eval_samples_per_client", 0));

  if (cfg.algo.tau < 1 || cfg.algo.T % cfg.algo.tau != 0)
    throw SchemaError("tau", "T must be divisible by tau");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json f;
  switch (cfg.federation.source) {
    case FederationSource::synthetic: {
      const SyntheticSpec& s = cfg.federation.synthetic;
      f = json{{"type", "synthetic"},
               {"n_clients", s.n_clients},
               {"dim", s.dim},
               {"samples_per_client", s.samples_per_client},
               {"heterogeneity",
                s.heterogeneity == Heterogeneity::one_class_per_client
                    ? "one_class_per_client"
                    : "mixed"},
               {"mix_alpha", s.mix_alpha},
               {"n_classes", s.n_classes},
               {"cluster_radius", s.cluster_radius},
               {"noise_std", s.noise_std},
               {"objective", s.objective.kind == ObjectiveKind::sigmoid_nonconvex
                                 ? "sigmoid"
                                 : "logistic"},
               {"l2_term", s.objective.l2_term}};
      break;
    }
    case FederationSource::csv:
      f = json{{"type", "csv"},
               {"path", cfg.federation.csv_path},
               {"partition", cfg.federation.csv.partition == CsvPartition::by_label
                                 ? "by_label"
                                 : "by_column"},
               {"partition_column", cfg.federation.csv.partition_column},
               {"label_column", cfg.federation.csv.label_column},
               {"has_header", cfg.federation.csv.has_header}};
      break;
    case FederationSource::quadratic:
      f = json{{"type", "quadratic"},
               {"centers", cfg.federation.centers},
               {"curvature", cfg.federation.curvature},
               {"l2_term", cfg.federation.l2_term}};
      break;
  }

  const char* algo_names[] = {"drfa", "drfa_prox", "drfa_ga", "fedavg"};
  json a{{"algorithm", algo_names[static_cast<int>(cfg.algo.algorithm)]},
         {"T", cfg.algo.T},
         {"tau", cfg.algo.tau},
         {"m", cfg.algo.m},
         {"eta", cfg.algo.eta},
         {"gamma", cfg.algo.gamma},
         {"batch_primal", cfg.algo.batch_primal},
         {"batch_probe", cfg.algo.batch_probe},
         {"primal_domain", domain_to_json(cfg.algo.primal_domain)},
         {"regularizer", regularizer_to_json(cfg.algo.regularizer)},
         {"output_mode",
          cfg.algo.output_mode == OutputMode::averaged
              ? "averaged"
              : cfg.algo.output_mode == OutputMode::last_iterate
                    ? "last_iterate"
                    : "tail_averaged"},
         {"ga_grad_at", cfg.algo.ga_grad_at == GaGradAt::stage_start
                            ? "stage_start"
                            : "stage_end"}};
  if (!cfg.algo.w0.empty()) a["w0"] = cfg.algo.w0;
  if (!cfg.algo.lambda0.empty()) a["lambda0"] = cfg.algo.lambda0;

  const char* preset_names[] = {"none", "theorem1", "theorem2_appendix"};
  json root{{"name", cfg.name},
            {"federation", f},
            {"algo", a},
            {"seeds", cfg.seeds},
            {"eval_every", cfg.eval_every},
            {"output_dir", cfg.output_dir},
            {"preset", preset_names[static_cast<int>(cfg.preset)]},
            {"eval_samples_per_client", cfg.eval_samples_per_client}};
  return root.dump(2);
}

Federation build_federation(const FederationConfig& fc, std::uint64_t seed) {
  switch (fc.source) {
    case FederationSource::synthetic:
      return make_synthetic_federation(fc.synthetic, seed);
    case FederationSource::csv:
      return load_csv_federation(fc.csv_path, fc.csv);
    case FederationSource::quadratic:
      return make_quadratic_federation(fc.centers, fc.curvature, fc.l2_term);
  }
  throw BadConfig("unknown federation source");
}

namespace {

// closest divisor of T to the target gap
long closest_divisor(long T, double target) {
  long best = 1;
  double best_err = 1e300;
  for (long d = 1; d <= T; ++d) {
    if (T % d != 0) continue;
    double err = std::abs(std::log(static_cast<double>(d) /
                                   std::max(target, 1.0)));
    if (err < best_err) {
      best_err = err;
      best = d;
    }
  }
  return best;
}

}  // namespace

void apply_preset(ExperimentConfig& cfg, const Federation& fed) {
  if (cfg.preset == Preset::none) return;
  const double L = estimate_smoothness(fed);
  const double T = static_cast<double>(cfg.algo.T);
  if (cfg.preset == Preset::theorem1) {
    cfg.algo.eta = 1.0 / (4.0 * L * std::sqrt(T));
    cfg.algo.gamma = std::pow(T, -5.0 / 8.0);
    double target =
        std::pow(T, 0.25) / std::sqrt(static_cast<double>(cfg.algo.m));
    cfg.algo.tau = closest_divisor(cfg.algo.T, target);
  } else {
    const double mu = estimate_strong_convexity(fed);
    if (!(mu > 0.0))
      throw BadConfig("theorem2_appendix preset needs a strongly convex objective");
    cfg.algo.eta = 4.0 * std::log(T) / (mu * T);
    cfg.algo.gamma = 1.0 / L;
  }
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

MetricRecord evaluate_record(const Federation& train_fed,
                             const Federation* eval_fed, const Vec& w,
                             long stage, long iteration, long comm_rounds) {
  MetricRecord r;
  r.stage = stage;
  r.iteration = iteration;
  r.comm_rounds = comm_rounds;
  const std::size_t N = train_fed.n_clients();
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) sum += eval_loss(train_fed, i, w);
  r.avg_loss = sum / static_cast<double>(N);
  PhiLinear phi = phi_linear(train_fed, w);
  r.worst_loss = phi.value;
  r.worst_client = phi.argmax_client;
  r.gamma_estimate = gradient_dissimilarity_at(train_fed, w);
  if (train_fed.objective.kind != ObjectiveKind::quadratic) {
    const Federation& ef = eval_fed ? *eval_fed : train_fed;
    ClassificationMetrics cm = classification_metrics(ef, w);
    r.worst_accuracy = cm.worst_accuracy;
    r.avg_accuracy = cm.avg_accuracy;
    r.fairness_std = cm.fairness_std;
  } else {
    r.worst_accuracy = r.avg_accuracy = r.fairness_std =
        std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

void write_metric_row(std::ostream& os, std::uint64_t seed,
                      const MetricRecord& r) {
  os << seed << ',' << r.stage << ',' << r.iteration << ',' << r.comm_rounds
     << ',' << format_double(r.avg_loss) << ',' << format_double(r.worst_loss)
     << ',' << r.worst_client << ',' << format_double(r.worst_accuracy) << ','
     << format_double(r.avg_accuracy) << ',' << format_double(r.fairness_std)
     << ',' << format_double(r.gamma_estimate) << '\n';
  os.flush();
}

}  // namespace

ResultsBundle run_experiment(const ExperimentConfig& cfg_in, bool write_files) {
  ExperimentConfig cfg = cfg_in;
  if (const char* env_out = std::getenv("DROFA_OUT"))
    cfg.output_dir = env_out;

  namespace fs = std::filesystem;
  std::ofstream metrics_csv, lambda_csv;
  if (write_files) {
    fs::create_directories(cfg.output_dir);
    metrics_csv.open(fs::path(cfg.output_dir) / "metrics.csv");
    lambda_csv.open(fs::path(cfg.output_dir) / "lambda_trace.csv");
    if (!metrics_csv || !lambda_csv)
      throw IoError("cannot write into " + cfg.output_dir);
    metrics_csv << "seed,stage,iteration,comm_rounds,avg_loss,worst_loss,"
                   "worst_client,worst_acc,avg_acc,fairness_std,gamma_est\n";
  }

  ResultsBundle bundle;
  bundle.config = cfg;
  auto t0 = std::chrono::steady_clock::now();

  json per_seed_summary = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    auto ts = std::chrono::steady_clock::now();
    Federation fed = build_federation(cfg.federation, seed);

    std::unique_ptr<Federation> eval_fed;
    if (cfg.eval_samples_per_client > 0 &&
        cfg.federation.source == FederationSource::synthetic) {
      SyntheticSpec es = cfg.federation.synthetic;
      es.samples_per_client = cfg.eval_samples_per_client;
      // held-out resample from the same generating distribution
      eval_fed = std::make_unique<Federation>(
          make_synthetic_federation(es, seed ^ 0x9e3779b97f4a7c15ULL));
    }

    ExperimentConfig resolved = cfg;
    apply_preset(resolved, fed);
    validate_config(resolved.algo, fed);

    SeedResult sr;
    sr.seed = seed;
    long comm_rounds = 0;
    StageObserver observer = [&](const StageTranscript& tr, const Vec& w_bar) {
      comm_rounds += tr.comm_exchanges;
      bool last = tr.stage + 1 == resolved.algo.stages();
      if ((tr.stage + 1) % cfg.eval_every != 0 && !last) return;
      MetricRecord r =
          evaluate_record(fed, eval_fed.get(), w_bar, tr.stage,
                          (tr.stage + 1) * resolved.algo.tau, comm_rounds);
      sr.records.push_back(r);
      if (write_files) {
        write_metric_row(metrics_csv, seed, r);
        lambda_csv << seed << ',' << tr.stage;
        for (std::size_t i = 0; i < tr.lambda_after.size(); ++i)
          lambda_csv << ',' << format_double(tr.lambda_after[i]);
        lambda_csv << '\n';
        lambda_csv.flush();
      }
    };

    RunResult rr = run_algorithm(fed, resolved.algo, seed, observer);
    sr.final_record = sr.records.empty() ? MetricRecord{} : sr.records.back();
    sr.w_hat = rr.w_hat.values;
    sr.lambda_hat = rr.lambda_hat.weights;
    sr.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ts)
            .count();

    if (write_files) {
      MetricRecord fr = evaluate_record(fed, eval_fed.get(), rr.w_hat.values,
                                        resolved.algo.stages() - 1,
                                        resolved.algo.T, comm_rounds);
      json js{{"seed", seed},
              {"eta", resolved.algo.eta},
              {"gamma", resolved.algo.gamma},
              {"tau", resolved.algo.tau},
              {"avg_loss", fr.avg_loss},
              {"worst_loss", fr.worst_loss},
              {"worst_client", fr.worst_client},
              {"gamma_estimate", fr.gamma_estimate},
              {"lambda_hat", sr.lambda_hat},
              {"comm_rounds", comm_rounds}};
      if (fed.objective.kind != ObjectiveKind::quadratic) {
        js["worst_accuracy"] = fr.worst_accuracy;
        js["avg_accuracy"] = fr.avg_accuracy;
        js["fairness_std"] = fr.fairness_std;
      }
      per_seed_summary.push_back(js);
    }
    bundle.per_seed.push_back(std::move(sr));
  }

  bundle.wall_seconds_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (write_files) {
    json summary{{"name", cfg.name},
                 {"config", json::parse(config_to_json(cfg))},
                 {"seeds", cfg.seeds},
                 {"version", "drofa 0.1.0"},
                 {"results", per_seed_summary}};
    std::ofstream js(fs::path(cfg.output_dir) / "summary.json");
    js << summary.dump(2) << '\n';
  }
  return bundle;
}

ComparisonResult compare(const std::vector<ExperimentConfig>& cfgs,
                         const std::string& out_dir) {
  if (cfgs.empty()) throw MisalignedConfigs("empty config list");
  for (std::size_t i = 1; i < cfgs.size(); ++i) {
    if (cfgs[i].seeds != cfgs[0].seeds)
      throw MisalignedConfigs("configs must share the seed list");
  }

  ComparisonResult out;
  for (const auto& cfg : cfgs) out.bundles.push_back(run_experiment(cfg, false));

  // pooled metric range -> decile thresholds; classification compares
  // worst accuracy (ascending), otherwise worst loss (descending)
  const bool classification =
      cfgs[0].federation.source != FederationSource::quadratic;
  double lo = 1e300, hi = -1e300;
  for (const auto& b : out.bundles)
    for (const auto& sr : b.per_seed)
      for (const auto& r : sr.records) {
        double v = classification ? r.worst_accuracy : r.worst_loss;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }

  for (int k = 1; k <= 9; ++k) {
    double thr = lo + (hi - lo) * k / 10.0;
    for (const auto& b : out.bundles)
      for (const auto& sr : b.per_seed) {
        CrossingStat cs{b.config.name, sr.seed, thr, -1, -1};
        for (const auto& r : sr.records) {
          bool crossed = classification ? r.worst_accuracy >= thr
                                        : r.worst_loss <= thr;
          if (crossed) {
            cs.comm_rounds = r.comm_rounds;
            cs.iteration = r.iteration;
            break;
          }
        }
        out.crossings.push_back(cs);
      }
  }

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream long_csv(fs::path(out_dir) / "comparison.csv");
    long_csv << "config,seed,stage,iteration,comm_rounds,avg_loss,worst_loss,"
                "worst_acc,avg_acc,fairness_std\n";
    for (const auto& b : out.bundles)
      for (const auto& sr : b.per_seed)
        for (const auto& r : sr.records)
          long_csv << csv_quote(b.config.name) << ',' << sr.seed << ','
                   << r.stage << ',' << r.iteration << ',' << r.comm_rounds
                   << ',' << format_double(r.avg_loss) << ','
                   << format_double(r.worst_loss) << ','
                   << format_double(r.worst_accuracy) << ','
                   << format_double(r.avg_accuracy) << ','
                   << format_double(r.fairness_std) << '\n';
    std::ofstream cross_csv(fs::path(out_dir) / "crossings.csv");
    cross_csv << "config,seed,threshold,first_comm_rounds,first_iteration\n";
    for (const auto& cs : out.crossings)
      cross_csv << csv_quote(cs.config_name) << ',' << cs.seed << ','
                << format_double(cs.threshold) << ',' << cs.comm_rounds << ','
                << cs.iteration << '\n';
  }
  return out;
}

}  // namespace drofa
