#include "core/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace duality {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep)) out.push_back(trim(token));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(Errc::config_error, "config: " + key + " is not an integer: '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    fail(Errc::config_error, "config: " + key + " is not an unsigned integer: '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(Errc::config_error, "config: " + key + " is not a number: '" + value + "'");
  }
}

Matrix parse_inline_unitary(const std::string& spec) {
  const std::string payload = spec.substr(std::string("inline:").size());
  const std::vector<std::string> parts = split(payload, ',');
  if (parts.empty() || parts.size() % 2 != 0) {
    fail(Errc::config_error, "config: inline coupler needs re,im pairs");
  }
  const std::size_t count = parts.size() / 2;
  const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
  if (static_cast<std::size_t>(dim) * dim != count) {
    fail(Errc::config_error, "config: inline coupler entry count is not a square");
  }
  Matrix u(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      const std::size_t base = 2 * (static_cast<std::size_t>(j) * dim + k);
      u(j, k) = Complex(parse_double("coupler", parts[base]), parse_double("coupler", parts[base + 1]));
    }
  }
  if (!is_unitary(u, 1e-9)) fail(Errc::config_error, "config: inline coupler is not unitary");
  return u;
}

int thread_count() {
  if (const char* env = std::getenv("DUALITY_LAB_THREADS")) {
    const std::string value(env);
    long v = 0;
    try {
      std::size_t used = 0;
      v = std::stol(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      fail(Errc::config_error, "DUALITY_LAB_THREADS must be a positive integer");
    }
    if (v < 1 || v > 4096) fail(Errc::config_error, "DUALITY_LAB_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

Vector random_pure_vector(int dim, RandomSource& rng) {
  Vector v = ginibre(dim, 1, rng).col(0);
  const double norm = v.norm();
  if (norm < 1e-9) return Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
  return v / norm;
}

// Mix of smooth, sparse, and near-degenerate distributions so the campaigns
// exercise interior points and boundary faces of the simplex.
RealVector random_distribution(int d, RandomSource& rng) {
  RealVector q = RealVector::Zero(d);
  switch (rng.uniform_int(0, 4)) {
    case 0:
      for (int i = 0; i < d; ++i) q[i] = -std::log(1.0 - rng.uniform());
      break;
    case 1:
      for (int i = 0; i < d; ++i) {
        const double g = rng.gaussian();
        q[i] = g * g;
      }
      break;
    case 2: {
      const int support = rng.uniform_int(1, d);
      for (int i = 0; i < support; ++i) q[i] = -std::log(1.0 - rng.uniform());
      for (int i = d - 1; i > 0; --i) std::swap(q[i], q[rng.uniform_int(0, i)]);
      break;
    }
    case 3: {
      const double eps = std::pow(10.0, -rng.uniform(1.0, 12.0));
      for (int i = 0; i < d; ++i) q[i] = eps * rng.uniform();
      q[rng.uniform_int(0, d - 1)] = 1.0;
      break;
    }
    default:
      q[rng.uniform_int(0, d - 1)] = 1.0;
      break;
  }
  const double total = q.sum();
  if (total <= 0.0) return RealVector::Constant(d, 1.0 / d);
  return q / total;
}

DensityOperator diagonal_density(int dim, RandomSource& rng) {
  const RealVector p = random_distribution(dim, rng);
  Matrix m = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = p[i];
  return DensityOperator::from_matrix(m);
}

CQState random_cq(int d, int m, RandomSource& rng) {
  const int style = rng.uniform_int(0, 3);
  const RealVector p = random_distribution(d, rng);
  DensityOperator shared = DensityOperator::maximally_mixed(m);
  if (style == 3) shared = random_density(m, rng.uniform_int(1, m), rng);
  std::vector<std::pair<double, DensityOperator>> ensemble;
  ensemble.reserve(static_cast<std::size_t>(d));
  for (int x = 0; x < d; ++x) {
    switch (style) {
      case 0:
        ensemble.emplace_back(p[x], random_density(m, rng.uniform_int(1, m), rng));
        break;
      case 1:
        ensemble.emplace_back(p[x], diagonal_density(m, rng));
        break;
      case 2:
        ensemble.emplace_back(p[x], random_density(m, 1, rng));
        break;
      default:
        ensemble.emplace_back(p[x], shared);
        break;
    }
  }
  return CQState::from_ensemble(std::move(ensemble));
}

int sample_path_count(const CampaignConfig& cfg, RandomSource& rng) {
  return rng.uniform_int(std::max(2, cfg.n_min), std::max(2, cfg.n_max));
}

int sample_env_dim(const CampaignConfig& cfg, RandomSource& rng) {
  return rng.uniform_int(cfg.env_min, cfg.env_max);
}

WhichPathCoupling sample_coupling(int n, const CampaignConfig& cfg, RandomSource& rng) {
  if (!cfg.gammas.empty()) {
    const double gamma = cfg.gammas[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(cfg.gammas.size()) - 1))];
    return WhichPathCoupling::scalar(n, gamma);
  }
  const int env = sample_env_dim(cfg, rng);
  std::vector<Vector> flags;
  flags.reserve(static_cast<std::size_t>(n));
  for (int z = 0; z < n; ++z) flags.push_back(random_pure_vector(env, rng));
  return WhichPathCoupling::from_flag_states(std::move(flags));
}

DensityOperator sample_input(int n, RandomSource& rng) {
  switch (rng.uniform_int(0, 2)) {
    case 0: {
      const Vector amps = random_pure_vector(n, rng);
      return DensityOperator::from_matrix(amps * amps.adjoint());
    }
    case 1:
      return random_density(n, rng.uniform_int(1, n), rng);
    default: {
      Matrix m = Matrix::Zero(n, n);
      m(0, 0) = 1.0;
      return DensityOperator::from_matrix(m);
    }
  }
}

}  // namespace

CampaignConfig CampaignConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config_error, "config: cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

CampaignConfig CampaignConfig::from_text(const std::string& text) {
  CampaignConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::config_error,
           "config: line " + std::to_string(lineno) + " is not of the form key = value");
    }
    cfg.apply_entry(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void CampaignConfig::apply_entry(const std::string& key, const std::string& value) {
  if (key == "relations") {
    relations.clear();
    if (value == "all") {
      relations = all_relations();
      return;
    }
    for (const std::string& token : split(value, ',')) {
      std::string upper = token;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      const std::optional<Relation> rel = relation_from_name(upper);
      if (!rel) fail(Errc::config_error, "config: unknown relation: '" + token + "'");
      relations.push_back(*rel);
    }
  } else if (key == "trials") {
    trials = parse_long(key, value);
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "tol") {
    tol = parse_double(key, value);
  } else if (key == "n_min") {
    n_min = static_cast<int>(parse_long(key, value));
  } else if (key == "n_max") {
    n_max = static_cast<int>(parse_long(key, value));
  } else if (key == "env_min") {
    env_min = static_cast<int>(parse_long(key, value));
  } else if (key == "env_max") {
    env_max = static_cast<int>(parse_long(key, value));
  } else if (key == "coupling") {
    gammas.clear();
    if (value != "random") {
      for (const std::string& token : split(value, ',')) {
        gammas.push_back(parse_double(key, token));
      }
    }
  } else if (key == "coupler") {
    coupler = value;
  } else if (key == "out") {
    out = value;
  } else {
    fail(Errc::config_error, "config: unknown key: '" + key + "'");
  }
}

std::string CampaignConfig::get_entry(const std::string& key) const {
  std::ostringstream out_stream;
  if (key == "relations") {
    for (std::size_t i = 0; i < relations.size(); ++i) {
      if (i > 0) out_stream << ',';
      out_stream << relation_name(relations[i]);
    }
  } else if (key == "trials") {
    out_stream << trials;
  } else if (key == "seed") {
    out_stream << seed;
  } else if (key == "tol") {
    out_stream << tol;
  } else if (key == "n_min") {
    out_stream << n_min;
  } else if (key == "n_max") {
    out_stream << n_max;
  } else if (key == "env_min") {
    out_stream << env_min;
  } else if (key == "env_max") {
    out_stream << env_max;
  } else if (key == "coupling") {
    if (gammas.empty()) {
      out_stream << "random";
    } else {
      for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (i > 0) out_stream << ',';
        out_stream << gammas[i];
      }
    }
  } else if (key == "coupler") {
    out_stream << coupler;
  } else if (key == "out") {
    out_stream << out;
  } else {
    fail(Errc::config_error, "config: unknown key: '" + key + "'");
  }
  return out_stream.str();
}

void CampaignConfig::validate() const {
  if (relations.empty()) fail(Errc::config_error, "config: relations must be nonempty");
  if (trials < 1 || trials > 10000000) {
    fail(Errc::config_error, "config: trials must be in [1, 1e7]");
  }
  if (!(tol >= 1e-12 && tol <= 1e-3)) {
    fail(Errc::config_error, "config: tol must be in [1e-12, 1e-3]");
  }
  if (n_min < 2 || n_max < n_min || n_max > 16) {
    fail(Errc::config_error, "config: need 2 <= n_min <= n_max <= 16");
  }
  if (env_min < 1 || env_max < env_min || env_max > 16) {
    fail(Errc::config_error, "config: need 1 <= env_min <= env_max <= 16");
  }
  for (const double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) fail(Errc::config_error, "config: coupling values must be in [0, 1]");
  }
  if (coupler != "fourier" && coupler != "haar") {
    if (coupler.rfind("inline:", 0) != 0) {
      fail(Errc::config_error, "config: coupler must be fourier, haar, or inline:<entries>");
    }
    const Matrix u = parse_inline_unitary(coupler);
    if (n_min != n_max || u.rows() != n_min) {
      fail(Errc::config_error, "config: inline coupler dimension must match a fixed n range");
    }
  }
}

Matrix CampaignConfig::make_fc1(int n, RandomSource& rng) const {
  if (coupler == "fourier") return fourier_matrix(n);
  if (coupler == "haar") return haar_unitary(n, rng);
  return parse_inline_unitary(coupler);
}

std::string TrialRecord::to_json() const {
  nlohmann::ordered_json j;
  j["relation"] = std::string(relation_name(relation));
  j["trial"] = trial;
  j["seed"] = seed;
  j["n"] = n;
  j["dims"] = dims;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["slack"] = report.slack;
  j["tol"] = report.tol;
  j["gap_allowance"] = report.gap_allowance;
  j["pass"] = report.pass;
  nlohmann::ordered_json terms = nlohmann::ordered_json::object();
  for (const auto& [name, value] : report.terms) terms[name] = value;
  j["terms"] = terms;
  j["gaps"] = report.solver_gaps;
  return j.dump();
}

TrialRecord run_trial(Relation relation, const CampaignConfig& cfg, long trial_index,
                      std::uint64_t trial_seed) {
  TrialRecord rec;
  rec.relation = relation;
  rec.trial = trial_index;
  rec.seed = trial_seed;
  RandomSource rng(trial_seed);

  try {
    switch (relation) {
      case Relation::lemma1: {
        const int d = sample_path_count(cfg, rng);
        rec.n = d;
        rec.dims = {d};
        rec.report = check_lemma1(random_distribution(d, rng), cfg.tol);
        break;
      }
      case Relation::lemma2: {
        const int d = sample_path_count(cfg, rng);
        const int m = sample_env_dim(cfg, rng);
        rec.n = d;
        rec.dims = {d, m};
        rec.report = check_lemma2(random_cq(d, m, rng), cfg.tol, rng);
        break;
      }
      case Relation::mmeur:
      case Relation::pguess_ur:
      case Relation::mub_ur: {
        const int da = sample_path_count(cfg, rng);
        const int db1 = sample_env_dim(cfg, rng);
        const int db2 = sample_env_dim(cfg, rng);
        rec.n = da;
        rec.dims = {da, db1, db2};
        const Vector amps = random_pure_vector(da * db1 * db2, rng);
        const DensityOperator rho = DensityOperator::from_matrix(amps * amps.adjoint());
        Matrix bx;
        Matrix by;
        const bool mub = relation == Relation::mub_ur || trial_index % 2 == 0;
        if (mub) {
          bx = Matrix::Identity(da, da);
          RealVector phases(da);
          for (int z = 0; z < da; ++z) phases[z] = rng.uniform(0.0, 2.0 * kPi);
          by = BasisFamily(da, phases).matrix();
        } else {
          bx = haar_unitary(da, rng);
          by = haar_unitary(da, rng);
        }
        if (relation == Relation::mmeur) {
          rec.report = check_mmeur(rho, da, db1, db2, bx, by, cfg.tol, rng);
        } else if (relation == Relation::pguess_ur) {
          rec.report = check_pguess_ur(rho, da, db1, db2, bx, by, cfg.tol, rng);
        } else {
          rec.report = check_mub_ur(rho, da, db1, db2, bx, by, cfg.tol, rng);
        }
        break;
      }
      case Relation::generic_wpdr: {
        const int n = sample_path_count(cfg, rng);
        const int d1 = sample_env_dim(cfg, rng);
        const int d2 = sample_env_dim(cfg, rng);
        rec.n = n;
        rec.dims = {n, d1, d2};
        const Matrix fc1 = cfg.make_fc1(n, rng);
        const DensityOperator input = sample_input(n, rng);
        std::vector<Vector> flags;
        flags.reserve(static_cast<std::size_t>(n));
        for (int z = 0; z < n; ++z) flags.push_back(random_pure_vector(d1 * d2, rng));
        const Interferometer ifm = Interferometer::make(
            n, fc1, input, WhichPathCoupling::from_flag_states(std::move(flags)),
            fourier_matrix(n));
        rec.report = check_generic_wpdr(ifm.propagate(), n, d1, d2, cfg.tol, rng);
        break;
      }
      case Relation::theorem1: {
        const int n = sample_path_count(cfg, rng);
        const Matrix fc1 = cfg.make_fc1(n, rng);
        const DensityOperator input = sample_input(n, rng);
        const WhichPathCoupling coupling = sample_coupling(n, cfg, rng);
        rec.n = n;
        rec.dims = {n, coupling.env_dim};
        const Interferometer ifm =
            Interferometer::make(n, fc1, input, coupling, random_symmetric_coupler(n, rng));
        rec.report = check_theorem1(ifm, cfg.tol, rng);
        break;
      }
      case Relation::asymmetric: {
        const int n = sample_path_count(cfg, rng);
        const Matrix fc1 = cfg.make_fc1(n, rng);
        const DensityOperator input = sample_input(n, rng);
        const WhichPathCoupling coupling = sample_coupling(n, cfg, rng);
        rec.n = n;
        rec.dims = {n, coupling.env_dim};
        const Interferometer ifm =
            Interferometer::make(n, fc1, input, coupling, haar_unitary(n, rng));
        rec.report = check_asymmetric(ifm, cfg.tol, rng, 16);
        break;
      }
      case Relation::erasure:
      case Relation::erasure_entropic: {
        const int n = sample_path_count(cfg, rng);
        const Matrix fc1 = cfg.make_fc1(n, rng);
        const DensityOperator input = sample_input(n, rng);
        const WhichPathCoupling coupling = sample_coupling(n, cfg, rng);
        const int outcomes = rng.uniform_int(2, 4);
        rec.n = n;
        rec.dims = {n, coupling.env_dim, outcomes};
        const POVM povm = random_povm(coupling.env_dim, outcomes, rng);
        const Interferometer ifm =
            Interferometer::make(n, fc1, input, coupling, random_symmetric_coupler(n, rng));
        const ErasureReports reports = check_erasure(ifm, povm, cfg.tol, rng);
        rec.report = relation == Relation::erasure ? reports.geometric : reports.entropic;
        break;
      }
      case Relation::durr_identity: {
        const int d = sample_path_count(cfg, rng);
        rec.n = d;
        rec.dims = {d};
        rec.report = check_durr_identity(random_density(d, rng.uniform_int(1, d), rng));
        break;
      }
      case Relation::n2_reductions: {
        const int n = 2;
        const Matrix fc1 = cfg.make_fc1(n, rng);
        const DensityOperator input = sample_input(n, rng);
        const WhichPathCoupling coupling = sample_coupling(n, cfg, rng);
        rec.n = n;
        rec.dims = {n, coupling.env_dim};
        const Interferometer ifm =
            Interferometer::make(n, fc1, input, coupling, random_symmetric_coupler(n, rng));
        rec.report = check_n2_reductions(ifm, cfg.tol, rng);
        break;
      }
    }
    rec.status = rec.report.pass ? "ok" : "violation";
  } catch (const Error& e) {
    if (e.code() != Errc::no_convergence && e.code() != Errc::zero_probability) throw;
    rec.status = "no_convergence";
    rec.error = e.what();
  }
  return rec;
}

CampaignSummary run_campaign(const CampaignConfig& config, const RecordSink& sink) {
  config.validate();

  struct Task {
    Relation relation;
    long index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(config.relations.size() * static_cast<std::size_t>(config.trials));
  std::uint64_t global = 0;
  for (const Relation relation : config.relations) {
    for (long i = 0; i < config.trials; ++i, ++global) {
      tasks.push_back({relation, i, config.seed ^ global});
    }
  }

  std::vector<TrialRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        const Task& t = tasks[i];
        TrialRecord rec = run_trial(t.relation, config, t.index, t.seed);
        // Non-convergence gets fresh derived seeds before being reported.
        static constexpr std::uint64_t kRetrySalts[] = {0x517cc1b727220a95ULL,
                                                        0x2545f4914f6cdd1dULL};
        for (const std::uint64_t salt : kRetrySalts) {
          if (rec.status != "no_convergence") break;
          rec = run_trial(t.relation, config, t.index, t.seed ^ salt);
        }
        records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int workers =
      std::max(1, std::min<int>(thread_count(), static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  CampaignSummary summary;
  for (const TrialRecord& rec : records) {
    ++summary.trials;
    if (rec.status == "violation") ++summary.violations;
    if (rec.status == "no_convergence") {
      ++summary.nonconvergences;
    } else if (!summary.min_slack_valid || rec.report.slack < summary.min_slack) {
      summary.min_slack = rec.report.slack;
      summary.min_slack_valid = true;
    }
    if (sink) sink(rec);
  }
  return summary;
}

Example1Report run_example1(int n, std::uint64_t seed, double tol) {
  (void)tol;
  if (n < 3) fail(Errc::invalid_argument, "example1: needs at least three paths");
  RandomSource rng(seed);
  const Matrix fc2 = fourier_matrix(n).adjoint();
  const DensityOperator rho_s = example1_state(n).to_density();

  Example1Report rep;
  rep.n = n;
  double max_prob = 0.0;
  for (int z = 0; z < n; ++z) max_prob = std::max(max_prob, rho_s.matrix()(z, z).real());
  rep.pguess = max_prob;
  rep.distinguishability = (n * max_prob - 1.0) / static_cast<double>(n - 1);
  rep.naive_visibility = visibility_naive(rho_s, fc2, 0, rng).value;
  rep.dark_probability = detection_distribution(rho_s, example1_phases(n), fc2)[0];
  rep.visibility = visibility_n(rho_s, fc2, rng).value;
  rep.tradeoff_slack = 1.0 - rep.visibility * rep.visibility -
                       rep.distinguishability * rep.distinguishability;
  return rep;
}

std::vector<SweepPoint> run_sweep(int n, const std::vector<double>& gammas, std::uint64_t seed,
                                  double tol) {
  if (n < 2) fail(Errc::config_error, "sweep: needs at least two paths");
  if (gammas.empty()) fail(Errc::config_error, "sweep: empty coupling grid");
  std::vector<double> grid = gammas;
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      fail(Errc::config_error, "sweep: coupling values must be in [0, 1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      fail(Errc::config_error, "sweep: coupling grid must be strictly increasing");
    }
  }

  const Matrix fc1 = fourier_matrix(n);
  const Matrix fc2 = fourier_matrix(n).adjoint();
  Matrix basis_state = Matrix::Zero(n, n);
  basis_state(0, 0) = 1.0;
  const DensityOperator input = DensityOperator::from_matrix(basis_state);

  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  const RandomSource base(seed);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    RandomSource rng = base.derive(i + 1);
    const WhichPathCoupling coupling = WhichPathCoupling::scalar(n, grid[i]);
    const Interferometer ifm = Interferometer::make(n, fc1, input, coupling, fc2);
    const DensityOperator rho_se = ifm.propagate();
    const DensityOperator rho_sys =
        partial_trace(rho_se, n, coupling.env_dim, Subsystem::first);
    SweepPoint p;
    p.gamma = grid[i];
    p.d = path_distinguishability(rho_se, n, coupling.env_dim, tol).value;
    p.v = visibility_n(rho_sys, fc2, rng).value;
    p.sum_sq = p.d * p.d + p.v * p.v;
    p.slack = 1.0 - p.sum_sq;
    points.push_back(p);
  }
  return points;
}

bool sweep_monotone(const std::vector<SweepPoint>& points, double tol) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].d > points[i - 1].d + tol) return false;
  }
  return true;
}

}  // namespace duality
