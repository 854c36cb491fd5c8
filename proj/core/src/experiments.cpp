#include "rmstx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace rmstx {
namespace {

using Clock = std::chrono::steady_clock;

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  if (value == "off" || value == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_number<double>(key, value);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& text, Parse parse) {
  std::vector<T> out;
  for (const auto& part : split(text, ',')) out.push_back(parse(key, part));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string value = trim(text);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_short(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

int square_side(int m) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  return side * side == m ? side : -1;
}

// Runs fn(0..n-1) over a small worker pool; each index writes its own slot.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Job {
  std::string scenario;
  ScenarioConfig config;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::proposed;
  bool with_iterations = false;
};

struct JobResult {
  std::vector<ResultRow> rows;
  ExperimentOutput::Solution solution;
  bool infeasible = false;
};

JobResult run_job(const Job& job) {
  const Scenario scenario = build_scenario(job.config, job.seed);
  const RunOutcome run = run_algorithm(scenario, job.algorithm, job.config.ao, job.seed);

  JobResult out;
  if (run.status == AoStatus::infeasible) {
    out.infeasible = true;
    return out;
  }
  const auto base = [&] {
    ResultRow row;
    row.scenario = job.scenario;
    row.seed = job.seed;
    row.algorithm = job.algorithm;
    return row;
  };
  if (job.with_iterations) {
    double elapsed = 0.0;
    for (const auto& it : run.trace.iterations) {
      elapsed += it.wall_ms;
      ResultRow row = base();
      row.iteration = it.iteration;
      row.sum_rate_bps_hz = it.objective;
      row.rank_one_gap = it.rank_one_gap;
      row.min_qos_slack = it.min_qos_slack;
      row.wall_ms = elapsed;
      out.rows.push_back(row);
    }
  }
  ResultRow final_row = base();
  final_row.sum_rate_bps_hz = run.sum_rate;
  final_row.rank_one_gap = run.rank_one_gap;
  final_row.min_qos_slack = run.min_qos_slack;
  final_row.wall_ms = run.wall_ms;
  out.rows.push_back(final_row);
  out.solution = {job.scenario, job.seed, job.algorithm, run.f, run.p};
  return out;
}

ExperimentOutput run_jobs(const std::vector<Job>& jobs, int threads) {
  std::vector<JobResult> results(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) { results[i] = run_job(jobs[i]); });

  // Single writer: rows are collected in job order after all workers finish.
  ExperimentOutput out;
  for (auto& r : results) {
    if (r.infeasible) {
      ++out.infeasible_runs;
      continue;
    }
    out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
    out.solutions.push_back(std::move(r.solution));
  }
  return out;
}

void add_jobs(std::vector<Job>& jobs, const std::string& scenario, const ScenarioConfig& config,
              const std::vector<Algorithm>& algorithms, bool with_iterations) {
  for (const auto seed : config.seeds)
    for (const auto algorithm : algorithms)
      jobs.push_back({scenario, config, seed, algorithm, with_iterations});
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::proposed: return "proposed";
    case Algorithm::ea: return "ea";
    case Algorithm::zf: return "zf";
    case Algorithm::ra: return "ra";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto a : kAllAlgorithms)
    if (to_string(a) == name) return a;
  return std::nullopt;
}

std::vector<std::uint64_t> ScenarioConfig::default_seeds(int n) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(n, 0)));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  return seeds;
}

LinkBudget ScenarioConfig::budget() const {
  LinkBudget b;
  b.noise_power = dbm_to_watt(noise_dbm);
  b.sinr_threshold = db_to_linear(gamma_th_db);
  b.total_power = dbm_to_watt(pt_dbm);
  return b;
}

ArrayGeometry ScenarioConfig::geometry() const {
  return ArrayGeometry::half_wavelength(m_x, m_z);
}

void ScenarioConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(k_users >= 1, "k_users must be >= 1");
  require(m_x >= 1 && m_z >= 1, "m_x and m_z must be >= 1");
  require(l_paths >= 1, "l_paths must be >= 1");
  require(std::isfinite(pt_dbm), "pt_dbm must be finite");
  require(std::isfinite(noise_dbm), "noise_dbm must be finite");
  require(!std::isnan(gamma_th_db) && gamma_th_db != std::numeric_limits<double>::infinity(),
          "gamma_th_db must be a number or off");
  require(cell_radius_m > 0.0 && std::isfinite(cell_radius_m), "cell_radius_m must be > 0");
  require(rms_height_m > 0.0 && std::isfinite(rms_height_m), "rms_height_m must be > 0");
  require(std::isfinite(ref_gain_db), "ref_gain_db must be finite");
  require(!seeds.empty(), "seeds must not be empty");
  require(!algorithms.empty(), "algorithm must not be empty");
  require(!pt_list_dbm.empty(), "pt_list_dbm must not be empty");
  for (double pt : pt_list_dbm) require(std::isfinite(pt), "pt_list_dbm entries must be finite");
  require(!k_list.empty(), "k_list must not be empty");
  for (int k : k_list) require(k >= 1, "k_list entries must be >= 1");
  require(!m_list.empty(), "m_list must not be empty");
  for (int m : m_list) require(m >= 1 && square_side(m) > 0, "m_list entries must be perfect squares");
  require(threads >= 0, "threads must be >= 0");
  try {
    ao.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void apply_setting(ScenarioConfig& c, std::string key, const std::string& value) {
  std::replace(key.begin(), key.end(), '-', '_');
  key = trim(key);
  const auto as_int = [&] { return parse_number<int>(key, value); };
  const auto as_real = [&] { return parse_real(key, value); };

  if (key == "k_users") c.k_users = as_int();
  else if (key == "m_x") c.m_x = as_int();
  else if (key == "m_z") c.m_z = as_int();
  else if (key == "l_paths") c.l_paths = as_int();
  else if (key == "pt_dbm") c.pt_dbm = as_real();
  else if (key == "noise_dbm") c.noise_dbm = as_real();
  else if (key == "gamma_th_db") c.gamma_th_db = as_real();
  else if (key == "cell_radius_m") c.cell_radius_m = as_real();
  else if (key == "rms_height_m") c.rms_height_m = as_real();
  else if (key == "ref_gain_db") c.ref_gain_db = as_real();
  else if (key == "seeds") c.seeds = parse_seeds(value);
  else if (key == "threads") c.threads = as_int();
  else if (key == "algorithm") {
    c.algorithms.clear();
    const std::string v = trim(value);
    if (v == "all") {
      c.algorithms.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
    } else {
      for (const auto& name : split(v, ',')) {
        const auto a = parse_algorithm(name);
        if (!a) throw ConfigError("unknown algorithm '" + name + "'");
        c.algorithms.push_back(*a);
      }
    }
  } else if (key == "pt_list_dbm") {
    c.pt_list_dbm = parse_list<double>(key, value, parse_real);
  } else if (key == "k_list") {
    c.k_list = parse_list<int>(key, value, parse_number<int>);
  } else if (key == "m_list") {
    c.m_list = parse_list<int>(key, value, parse_number<int>);
  }
  // AoConfig overrides.
  else if (key == "convergence_threshold") c.ao.convergence_threshold = as_real();
  else if (key == "max_outer_iterations") c.ao.max_outer_iterations = as_int();
  else if (key == "rank_one_tolerance") c.ao.rank_one_tolerance = as_real();
  else if (key == "optimize_power") c.ao.optimize_power = parse_bool(key, value);
  else if (key == "penalty_initial_scale") c.ao.penalty.initial_scale = as_real();
  else if (key == "penalty_growth") c.ao.penalty.growth = as_real();
  else if (key == "penalty_cadence") c.ao.penalty.cadence = as_int();
  else if (key == "solver_tolerance") c.ao.solver.tolerance = as_real();
  else if (key == "solver_max_iterations") c.ao.solver.max_iterations = as_int();
  else throw ConfigError("unknown config key '" + key + "'");
}

void load_config(ScenarioConfig& config, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config_file(ScenarioConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_config(config, in);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  const std::string value = trim(text);
  if (value.find(',') == std::string::npos) {
    const auto n = parse_number<int>("seeds", value);
    if (n < 1) throw ConfigError("seeds count must be >= 1");
    return ScenarioConfig::default_seeds(n);
  }
  return parse_list<std::uint64_t>("seeds", value, parse_number<std::uint64_t>);
}

Rng make_rng(std::uint64_t seed, std::uint32_t stream, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream, index};
  return Rng(seq);
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Scenario s;
  s.geometry = config.geometry();
  s.rms = {0.0, 0.0, config.rms_height_m};
  s.budget = config.budget();

  PathLossModel path_loss;
  path_loss.reference_gain_db = config.ref_gain_db;

  // Positions are drawn sequentially, so the first K users agree for any K.
  Rng placement = make_rng(seed, 0);
  const auto positions = place_users(config.k_users, config.cell_radius_m, placement);
  s.channels.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    Rng rng = make_rng(seed, 1, static_cast<std::uint32_t>(k));
    s.channels.push_back(
        generate_channel(s.geometry, config.l_paths, rng, positions[k], s.rms, path_loss));
  }
  return s;
}

RunOutcome run_algorithm(const Scenario& scenario, Algorithm algorithm,
                         const AoConfig& config, std::uint64_t seed) {
  const auto start = Clock::now();
  RunOutcome out;
  out.algorithm = algorithm;
  std::optional<CMatrix> lifted;

  switch (algorithm) {
    case Algorithm::proposed: {
      AoResult r = optimize(scenario.channels, scenario.budget, config);
      out.f = r.f;
      out.p = r.p;
      out.status = r.status;
      out.diagnostic = r.diagnostic;
      out.trace = std::move(r.trace);
      lifted = std::move(r.f_matrix);
      break;
    }
    case Algorithm::ea: {
      BaselineResult r = equal_allocation(scenario.channels, scenario.budget, config);
      out.f = r.f;
      out.p = r.p;
      out.status = r.status;
      out.trace = std::move(r.trace);
      lifted = std::move(r.f_matrix);
      break;
    }
    case Algorithm::zf: {
      const BaselineResult r = zf_beamforming(scenario.channels, scenario.budget);
      out.f = r.f;
      out.p = r.p;
      break;
    }
    case Algorithm::ra: {
      Rng rng = make_rng(seed, 2);
      const BaselineResult r = random_allocation(scenario.channels, scenario.budget, rng);
      out.f = r.f;
      out.p = r.p;
      break;
    }
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  out.sum_rate = sum_rate(scenario.channels, out.f, out.p, scenario.budget);
  out.min_qos_slack = qos_satisfied(scenario.channels, out.f, out.p, scenario.budget).min_slack();
  if (lifted && lifted->size() > 0) {
    const auto extraction = extract_rank_one(*lifted, config.rank_one_tolerance);
    out.rank_one_gap = extraction.relative_gap;
    const double lifted_rate =
        sum_rate_from_gains(lifted_gains(scenario.channels, *lifted), out.p, scenario.budget);
    if (lifted_rate > 0.0) out.extraction_change = std::abs(out.sum_rate - lifted_rate) / lifted_rate;
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.seed << ',' << to_string(r.algorithm) << ','
        << (r.iteration ? std::to_string(*r.iteration) : std::string("final")) << ','
        << format_real(r.sum_rate_bps_hz) << ',' << format_real(r.rank_one_gap) << ','
        << format_real(r.min_qos_slack) << ',' << format_real(r.wall_ms) << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw std::runtime_error("read_csv: header mismatch");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 8) throw std::runtime_error("read_csv: expected 8 fields: " + line);
    ResultRow r;
    r.scenario = f[0];
    r.seed = parse_number<std::uint64_t>("seed", f[1]);
    const auto algo = parse_algorithm(f[2]);
    if (!algo) throw std::runtime_error("read_csv: unknown algorithm " + f[2]);
    r.algorithm = *algo;
    if (f[3] != "final") r.iteration = parse_number<int>("iteration", f[3]);
    r.sum_rate_bps_hz = std::stod(f[4]);
    r.rank_one_gap = std::stod(f[5]);
    r.min_qos_slack = std::stod(f[6]);
    r.wall_ms = std::stod(f[7]);
    rows.push_back(r);
  }
  return rows;
}

ExperimentOutput run_convergence(const ScenarioConfig& config) {
  config.validate();
  std::vector<Job> jobs;
  for (const double pt : config.pt_list_dbm) {
    ScenarioConfig c = config;
    c.pt_dbm = pt;
    add_jobs(jobs, "convergence-pt" + format_short(pt), c, {Algorithm::proposed}, true);
  }
  return run_jobs(jobs, config.threads);
}

ExperimentOutput run_user_sweep(const ScenarioConfig& config) {
  config.validate();
  std::vector<Job> jobs;
  for (const int k : config.k_list) {
    ScenarioConfig c = config;
    c.k_users = k;
    add_jobs(jobs, "users-k" + std::to_string(k), c, config.algorithms, false);
  }
  return run_jobs(jobs, config.threads);
}

ExperimentOutput run_element_sweep(const ScenarioConfig& config) {
  config.validate();
  std::vector<Job> jobs;
  for (const int m : config.m_list) {
    ScenarioConfig c = config;
    c.m_x = c.m_z = square_side(m);
    add_jobs(jobs, "elements-m" + std::to_string(m), c, config.algorithms, false);
  }
  return run_jobs(jobs, config.threads);
}

ExperimentOutput run_single(const ScenarioConfig& config) {
  config.validate();
  std::vector<Job> jobs;
  add_jobs(jobs, "single", config, config.algorithms, true);
  return run_jobs(jobs, config.threads);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::vector<double> sum_sq;
  std::map<std::pair<std::string, Algorithm>, std::size_t> index;
  for (const auto& r : rows) {
    if (r.iteration) continue;
    const auto key = std::make_pair(r.scenario, r.algorithm);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({r.scenario, r.algorithm, 0, 0.0, 0.0});
      sum_sq.push_back(0.0);
    }
    auto& s = out[it->second];
    ++s.runs;
    s.mean_sum_rate += r.sum_rate_bps_hz;
    sum_sq[it->second] += r.sum_rate_bps_hz * r.sum_rate_bps_hz;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& s = out[i];
    const double n = s.runs;
    s.mean_sum_rate /= n;
    if (s.runs > 1) {
      const double var = std::max(0.0, (sum_sq[i] - n * s.mean_sum_rate * s.mean_sum_rate) / (n - 1));
      s.std_error = std::sqrt(var / n);
    }
  }
  return out;
}

void write_solution(std::ostream& out, const std::string& scenario,
                    const TransmissionCoefficients& f, const PowerAllocation& p) {
  out << f.values.size() << '\n' << p.size() << '\n' << scenario << '\n';
  for (Eigen::Index m = 0; m < f.values.size(); ++m)
    out << format_real(f.values[m].real()) << ' ' << format_real(f.values[m].imag()) << '\n';
  for (Eigen::Index k = 0; k < p.size(); ++k) out << format_real(p.powers[k]) << '\n';
}

SolutionFile read_solution(std::istream& in) {
  SolutionFile s;
  Eigen::Index m = 0;
  Eigen::Index k = 0;
  if (!(in >> m >> k) || m < 1 || k < 1)
    throw std::runtime_error("read_solution: bad size header");
  in >> std::ws;
  if (!std::getline(in, s.scenario)) throw std::runtime_error("read_solution: missing scenario");
  s.f.values.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double re = 0.0;
    double im = 0.0;
    if (!(in >> re >> im)) throw std::runtime_error("read_solution: truncated beam");
    s.f.values[i] = {re, im};
  }
  s.p.powers.resize(k);
  for (Eigen::Index i = 0; i < k; ++i)
    if (!(in >> s.p.powers[i])) throw std::runtime_error("read_solution: truncated powers");
  return s;
}

}  // namespace rmstx
