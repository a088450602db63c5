#include "newsamp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "newsamp/trace_io.hpp"

namespace newsamp::cli {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  auto end = s.find_last_not_of(" \t");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t dataset_hash(const Objective& obj) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const Dataset& ds = obj.data();
  h = fnv1a(ds.X.data(), sizeof(double) * static_cast<std::size_t>(ds.X.size()),
            h);
  h = fnv1a(ds.y.data(), sizeof(double) * static_cast<std::size_t>(ds.y.size()),
            h);
  std::string kind = kind_name(obj.kind());
  h = fnv1a(kind.data(), kind.size(), h);
  double c = obj.svm_penalty();
  h = fnv1a(&c, sizeof c, h);
  return h;
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value', got '" + line + "'", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("empty key in config line", line_no);
    cfg.values_[key] = value;
  }
  return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[trim(key)] = trim(value);
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: '" + raw +
                      "'");
  }
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::size_t KeyValueConfig::get_size(const std::string& key) const {
  double v = get_double(key);
  if (v < 0 || v != std::floor(v))
    throw ConfigError("config key '" + key +
                      "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::size_t KeyValueConfig::get_size(const std::string& key,
                                     std::size_t fallback) const {
  return has(key) ? get_size(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(
    const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(get_string(key));
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key) const {
  std::vector<double> out;
  for (const auto& token : get_list(key)) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-numeric entry '" +
                        token + "'");
    }
  }
  return out;
}

SpikedModelSpec parse_spiked_spec(const KeyValueConfig& cfg) {
  SpikedModelSpec spec;
  spec.n = cfg.get_size("spiked.n");
  spec.p = static_cast<Index>(cfg.get_size("spiked.p"));
  if (cfg.has("spiked.spikes")) {
    spec.spike_values = cfg.get_double_list("spiked.spikes");
  }
  spec.r_spikes = static_cast<Index>(spec.spike_values.size());
  spec.noise_floor = cfg.get_double("spiked.noise_floor", 1.0);
  spec.label_model =
      label_model_from_name(cfg.get_string("spiked.label_model",
                                           "logistic-planted"));
  spec.seed = cfg.get_size("spiked.seed", cfg.get_size("run.seed", 0));
  return spec;
}

namespace {

LabelMap label_map_from_name(const std::string& name) {
  if (name == "auto") return LabelMap::automatic;
  if (name == "none") return LabelMap::none;
  if (name == "pm1") return LabelMap::plus_minus_one;
  if (name == "01") return LabelMap::zero_one;
  throw ConfigError("unknown label map '" + name + "'");
}

}  // namespace

LoadedProblem load_problem(const KeyValueConfig& cfg) {
  ObjectiveKind kind = kind_from_name(cfg.get_string("problem.kind"));
  Dataset ds;
  if (cfg.has("problem.data")) {
    std::string path = cfg.get_string("problem.data");
    LabelMap map =
        label_map_from_name(cfg.get_string("problem.label_map", "auto"));
    if (path.size() >= 7 &&
        path.compare(path.size() - 7, 7, ".libsvm") == 0) {
      ds = load_libsvm(path, 0, map);
    } else {
      std::string col = cfg.get_string("problem.label_column", "last");
      Dataset probe = load_csv(path, 0, LabelMap::none);
      Index label_column = col == "last"
                               ? probe.p()  // total width - 1
                               : static_cast<Index>(std::stoul(col));
      ds = load_csv(path, label_column, map);
    }
  } else {
    ds = generate_spiked(parse_spiked_spec(cfg));
  }
  if (cfg.get_bool("problem.standardize", false)) ds = standardize(ds);
  double c = cfg.get_double("problem.svm_c", 0.0);
  Objective obj(ds, kind, c);
  return LoadedProblem{std::move(ds), std::move(obj)};
}

ConvexSet parse_convex_set(const KeyValueConfig& cfg, Index dim) {
  std::string kind = cfg.get_string("set.kind", "unconstrained");
  if (kind == "unconstrained") return ConvexSet::unconstrained();
  if (kind == "ball") {
    Vector center = Vector::Zero(dim);
    if (cfg.has("set.center")) {
      auto vals = cfg.get_double_list("set.center");
      if (static_cast<Index>(vals.size()) != dim)
        throw ConfigError("set.center length does not match the dimension");
      center = Eigen::Map<const Vector>(vals.data(), dim);
    }
    return ConvexSet::l2_ball(center, cfg.get_double("set.radius"));
  }
  if (kind == "box") {
    auto lo = cfg.get_double_list("set.lower");
    auto hi = cfg.get_double_list("set.upper");
    if (static_cast<Index>(lo.size()) != dim ||
        static_cast<Index>(hi.size()) != dim)
      throw ConfigError("set.lower/set.upper length does not match");
    return ConvexSet::box(Eigen::Map<const Vector>(lo.data(), dim),
                          Eigen::Map<const Vector>(hi.data(), dim));
  }
  throw ConfigError("unknown set.kind '" + kind + "'");
}

Vector reference_solution(const KeyValueConfig& cfg, const Objective& obj,
                          std::ostream& log) {
  if (cfg.has("reference.path")) {
    std::ifstream in(cfg.get_string("reference.path"));
    if (!in) throw IoError("cannot open reference file");
    json j = json::parse(in);
    auto vals = j.at("theta").get<std::vector<double>>();
    if (static_cast<Index>(vals.size()) != obj.dim())
      throw ConfigError("reference vector length does not match");
    return Eigen::Map<const Vector>(vals.data(), obj.dim());
  }
  std::string cache_dir = cfg.get_string("reference.cache_dir", "");
  std::string cache_path;
  if (!cache_dir.empty()) {
    char name[64];
    std::snprintf(name, sizeof name, "ref_%016llx.json",
                  static_cast<unsigned long long>(dataset_hash(obj)));
    cache_path = cache_dir + "/" + name;
    std::ifstream in(cache_path);
    if (in) {
      json j = json::parse(in);
      auto vals = j.at("theta").get<std::vector<double>>();
      if (static_cast<Index>(vals.size()) == obj.dim()) {
        log << "reference: cache hit " << cache_path << "\n";
        return Eigen::Map<const Vector>(vals.data(), obj.dim());
      }
    }
  }
  double tol = cfg.get_double("reference.grad_tol", 1e-12);
  Vector star = newton_reference(obj, Vector::Zero(obj.dim()), tol, 500);
  if (!cache_path.empty()) {
    std::filesystem::create_directories(cache_dir);
    json j;
    j["theta"] = std::vector<double>(star.data(), star.data() + star.size());
    j["grad_norm"] = obj.gradient(star).norm();
    std::ofstream out(cache_path);
    if (out) out << j.dump(2) << "\n";
    log << "reference: solved and cached " << cache_path << "\n";
  }
  return star;
}

namespace {

struct MethodRun {
  Trace trace;
  std::string name;
  std::optional<double> chosen_step;
};

NewSampConfig newsamp_config(const KeyValueConfig& cfg, const std::string& key,
                             Index dim, std::size_t n) {
  NewSampConfig out;
  out.rank = static_cast<Index>(cfg.get_size(key + ".rank", 3));
  std::size_t size = cfg.get_size(key + ".sample_size", std::max<std::size_t>(
                                                            n / 10, 1));
  std::string scheme = cfg.get_string(key + ".scheme", "s1");
  std::uint64_t seed = cfg.get_size("run.seed", 0);
  if (scheme == "s2-growing") {
    out.scheme = SampleScheme::growing(size, seed,
                                       cfg.get_size(key + ".increment", 0));
  } else if (scheme == "s2-fixed") {
    out.scheme = SampleScheme::fixed_subset(size, seed);
  } else if (scheme == "s1-nr") {
    out.scheme = SampleScheme::independent(size, seed, false);
  } else if (scheme == "s1") {
    out.scheme = SampleScheme::independent(size, seed, true);
  } else {
    throw ConfigError("unknown sampling scheme '" + scheme + "'");
  }
  std::string step = cfg.get_string(key + ".step", "adaptive");
  if (step == "adaptive") {
    out.step = StepMode::adaptive(cfg.get_double(key + ".c_step", 1.0));
  } else {
    try {
      out.step = StepMode::fixed(std::stod(step));
    } catch (const std::exception&) {
      throw ConfigError("'" + key + ".step' must be 'adaptive' or a number");
    }
  }
  out.eps = cfg.get_double("run.eps", 1e-8);
  out.max_iters = cfg.get_size("run.max_iters", 100);
  out.theta0 = Vector::Zero(dim);
  return out;
}

BaselineConfig baseline_config(const KeyValueConfig& cfg,
                               const std::string& name, Index dim) {
  BaselineConfig out;
  out.method = baseline_from_name(name);
  out.step = cfg.get_double(name + ".step", 1.0);
  out.exact_line_step = cfg.get_bool(name + ".exact_line_step", false);
  out.memory = cfg.get_size(name + ".memory", 10);
  out.sgd_step = cfg.get_double(name + ".gamma", 1.0);
  out.sgd_decay = cfg.get_double(name + ".c", 1.0);
  if (out.method == BaselineMethod::adagrad) {
    out.ada_step = cfg.get_double(name + ".gamma", 0.1);
    out.ada_floor = cfg.get_double(name + ".delta", 1e-8);
  }
  out.eps = cfg.get_double("run.eps", 1e-8);
  out.max_iters = cfg.get_size("run.max_iters", 1000);
  out.record_every = cfg.get_size(name + ".record_every", 1);
  out.theta0 = Vector::Zero(dim);
  out.seed = cfg.get_size("run.seed", 0);
  return out;
}

bool is_batch_baseline(const std::string& name) {
  return name == "gd" || name == "agd" || name == "newton" ||
         name == "bfgs" || name == "lbfgs";
}

// Runs one named method. Batch baselines optionally sweep a constant-step
// grid and keep the fastest-converging run.
MethodRun run_method(const KeyValueConfig& cfg, const std::string& name,
                     const Objective& obj, const ConvexSet& set,
                     const std::optional<Vector>& reference) {
  MethodRun out;
  out.name = name;
  const Index dim = obj.dim();
  const std::size_t n = static_cast<std::size_t>(obj.data().n());
  if (name == "newsamp") {
    out.trace = newsamp_run(obj, newsamp_config(cfg, name, dim, n), set,
                            reference);
    return out;
  }
  if (name == "plain-newton") {
    out.trace = plain_subsampled_newton_run(
        obj, newsamp_config(cfg, name, dim, n), set, reference);
    return out;
  }
  BaselineConfig bcfg = baseline_config(cfg, name, dim);
  if (is_batch_baseline(name) && cfg.has(name + ".step_grid")) {
    auto grid = cfg.get_double_list(name + ".step_grid");
    if (grid.empty()) throw ConfigError(name + ".step_grid is empty");
    bool have = false;
    for (double step : grid) {
      BaselineConfig candidate = bcfg;
      candidate.step = step;
      Trace tr = run_baseline(obj, candidate, set, reference);
      auto better = [&](const Trace& a, const Trace& b) {
        bool ca = a.reason == StopReason::eps_reached;
        bool cb = b.reason == StopReason::eps_reached;
        if (ca != cb) return ca;
        if (ca && a.iterations != b.iterations)
          return a.iterations < b.iterations;
        return a.last().grad_norm < b.last().grad_norm;
      };
      if (!have || better(tr, out.trace)) {
        out.trace = std::move(tr);
        out.chosen_step = step;
        have = true;
      }
    }
    return out;
  }
  out.trace = run_baseline(obj, bcfg, set, reference);
  out.chosen_step = bcfg.step;
  return out;
}

json summary_json(const MethodRun& run) {
  const Trace& tr = run.trace;
  json j;
  j["method"] = run.name;
  j["reason"] = stop_reason_name(tr.reason);
  j["iterations"] = tr.iterations;
  j["records"] = tr.records.size();
  if (!tr.records.empty()) {
    j["final_f"] = tr.last().objective;
    j["final_grad_norm"] = tr.last().grad_norm;
    j["elapsed_s"] = tr.last().elapsed_s;
    j["final_dist"] =
        tr.last().dist ? json(*tr.last().dist) : json(nullptr);
  }
  j["chosen_step"] =
      run.chosen_step ? json(*run.chosen_step) : json(nullptr);
  if (!tr.error_message.empty()) j["error"] = tr.error_message;
  if (!tr.warnings.empty()) j["warnings"] = tr.warnings;
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace

int cmd_generate(const KeyValueConfig& cfg, std::ostream& out) {
  SpikedModelSpec spec = parse_spiked_spec(cfg);
  Dataset ds = generate_spiked(spec);
  std::string path = cfg.get_string("out.dataset");
  save_csv(ds, path);

  // Top eigenvalues of the centered sample covariance.
  Vector mean = ds.X.colwise().mean();
  Matrix centered = ds.X.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / static_cast<double>(ds.n());
  Index k = std::min<Index>(spec.r_spikes + 1, spec.p);
  auto te = truncated_eigen(SymMatrix(cov), std::max<Index>(k, 1));
  out << "n = " << ds.n() << ", p = " << ds.p() << "\n";
  out << "top sample-covariance eigenvalues:";
  for (Index i = 0; i < te.rank(); ++i) out << ' ' << te.values[i];
  out << "\nwrote " << path << "\n";
  return 0;
}

int cmd_optimize(const KeyValueConfig& cfg, std::ostream& out) {
  LoadedProblem problem = load_problem(cfg);
  ConvexSet set = parse_convex_set(cfg, problem.objective.dim());
  std::string method = cfg.get_string("method");
  std::optional<Vector> reference;
  if (cfg.has("reference.path") || cfg.get_bool("reference.solve", false))
    reference = reference_solution(cfg, problem.objective, out);

  MethodRun run = run_method(cfg, method, problem.objective, set, reference);
  if (cfg.has("out.trace")) write_trace_jsonl(run.trace,
                                              cfg.get_string("out.trace"));
  json summary = summary_json(run);
  if (cfg.has("out.summary"))
    write_text(cfg.get_string("out.summary"), summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return run.trace.reason == StopReason::error ? 1 : 0;
}

int cmd_benchmark(const KeyValueConfig& cfg, std::ostream& out) {
  auto methods = cfg.get_list("benchmark.methods");
  if (methods.size() < 2)
    throw ConfigError("benchmark needs at least two methods");
  LoadedProblem problem = load_problem(cfg);
  ConvexSet set = parse_convex_set(cfg, problem.objective.dim());
  Vector reference = reference_solution(cfg, problem.objective, out);
  double dist_tol = cfg.get_double("benchmark.dist_tol", 1e-6);
  std::string dir = cfg.get_string("out.dir", ".");
  std::filesystem::create_directories(dir);

  std::ostringstream table;
  table << "method,iters_to_tol,elapsed_s,final_dist,reason\n";
  for (const auto& name : methods) {
    MethodRun run = run_method(cfg, name, problem.objective, set, reference);
    write_trace_jsonl(run.trace, dir + "/" + name + ".jsonl");
    long iters_to_tol = -1;
    for (const auto& rec : run.trace.records) {
      if (rec.dist && *rec.dist <= dist_tol) {
        iters_to_tol = static_cast<long>(rec.t);
        break;
      }
    }
    const auto& last = run.trace.last();
    table << name << ',' << iters_to_tol << ',' << last.elapsed_s << ','
          << (last.dist ? *last.dist : std::nan("")) << ','
          << stop_reason_name(run.trace.reason) << '\n';
    out << name << ": reason=" << stop_reason_name(run.trace.reason)
        << " iters_to_tol=" << iters_to_tol << "\n";
  }
  std::string table_path =
      cfg.get_string("out.table", dir + "/benchmark.csv");
  write_text(table_path, table.str());
  out << "wrote " << table_path << "\n";
  return 0;
}

int cmd_coeffs(const KeyValueConfig& cfg, std::ostream& out) {
  LoadedProblem problem = load_problem(cfg);
  const Objective& obj = problem.objective;
  const Index p = obj.dim();
  Vector theta = reference_solution(cfg, obj, out);

  Index rank = static_cast<Index>(cfg.get_size("coeffs.rank", 3));
  if (rank + 1 > p) throw ConfigError("coeffs.rank needs rank + 1 <= p");
  std::size_t sample_size = cfg.get_size(
      "coeffs.sample_size",
      std::max<std::size_t>(static_cast<std::size_t>(obj.data().n()) / 10, 1));

  auto dec = full_eigen(obj.full_hessian(theta));
  double lambda_top = dec.values[0];
  double lambda_threshold = dec.values[rank];
  double lambda_min = std::max(dec.values[p - 1], 0.0);

  ConstantsQuery query;
  query.iterates.push_back(theta);
  query.sample_size = sample_size;
  ProblemConstants constants = obj.constants(query);

  double c_step = cfg.get_double("coeffs.c_step", 1.0);
  double eta =
      adaptive_step(lambda_min, lambda_threshold, p, sample_size, c_step);
  auto report = coefficients_s1(lambda_min, lambda_threshold, eta,
                                constants.hessian_bound,
                                constants.hessian_lipschitz, p, sample_size,
                                cfg.get_double("coeffs.c_abs", 6.0));
  if (is_svm(obj.kind())) report.covered = false;

  json j;
  j["kind"] = kind_name(obj.kind());
  j["scheme"] = "s1";
  j["rank"] = rank;
  j["sample_size"] = sample_size;
  j["eta"] = eta;
  j["linear_coeff"] = number_or_null(report.linear_coeff);
  j["quad_coeff"] = number_or_null(report.quad_coeff);
  j["lambda_top"] = lambda_top;
  j["lambda_threshold"] = lambda_threshold;
  j["lambda_min"] = lambda_min;
  j["hessian_bound"] = number_or_null(constants.hessian_bound);
  j["lipschitz"] = number_or_null(constants.hessian_lipschitz);
  j["c_abs"] = report.c_abs;
  j["covered"] = report.covered;
  // Sample size making the sampling term comparable to the gap term, and the
  // rank guidance from the effective rank of the Hessian.
  double suggested =
      lambda_min > 0.0
          ? std::pow(constants.hessian_bound / lambda_min, 2.0) *
                std::log(static_cast<double>(p))
          : std::numeric_limits<double>::infinity();
  j["suggested_sample_size"] = number_or_null(suggested);
  j["effective_rank"] = dec.values.sum() / lambda_top;
  try {
    j["start_radius"] = number_or_null(sufficient_start_radius(
        report.linear_coeff, report.quad_coeff, 0.0));
  } catch (const NoGuarantee&) {
    j["start_radius"] = nullptr;
    j["start_radius_note"] = "no guarantee: linear coefficient reaches 1";
  }
  std::string text = j.dump(2) + "\n";
  if (cfg.has("out.report")) write_text(cfg.get_string("out.report"), text);
  out << text;
  return 0;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const InvalidRank*>(&e)) return "invalid-rank";
  if (dynamic_cast<const InvalidSize*>(&e)) return "invalid-size";
  if (dynamic_cast<const DegenerateSpectrum*>(&e)) return "degenerate-spectrum";
  if (dynamic_cast<const NumericalFailure*>(&e)) return "numerical-failure";
  if (dynamic_cast<const EvalOverflow*>(&e)) return "overflow";
  if (dynamic_cast<const RequiresBoundedSet*>(&e)) return "requires-bounded-set";
  if (dynamic_cast<const OutOfRegime*>(&e)) return "out-of-regime";
  if (dynamic_cast<const SampleTooSmall*>(&e)) return "sample-too-small";
  if (dynamic_cast<const NoGuarantee*>(&e)) return "no-guarantee";
  if (dynamic_cast<const NoBound*>(&e)) return "no-bound";
  if (dynamic_cast<const InsufficientData*>(&e)) return "insufficient-data";
  if (dynamic_cast<const InvalidInput*>(&e)) return "invalid-input";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

}  // namespace newsamp::cli
