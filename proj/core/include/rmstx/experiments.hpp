#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rmstx/ao.hpp"
#include "rmstx/baselines.hpp"
#include "rmstx/channel.hpp"

namespace rmstx {

enum class Algorithm { proposed, ea, zf, ra };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::proposed, Algorithm::ea,
                                               Algorithm::zf, Algorithm::ra};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int k_users = 4;
  int m_x = 5;
  int m_z = 5;
  int l_paths = 3;
  double pt_dbm = 43.0;
  double noise_dbm = -70.0;
  // QoS threshold in dB; -inf disables the QoS rows.
  double gamma_th_db = -std::numeric_limits<double>::infinity();
  double cell_radius_m = 50.0;
  double rms_height_m = 15.0;
  double ref_gain_db = -85.0;  // path-loss reference gain at 1 m
  std::vector<std::uint64_t> seeds = default_seeds(20);
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  AoConfig ao;

  // Sweep axes.
  std::vector<double> pt_list_dbm{39.0, 41.0, 43.0};
  std::vector<int> k_list{2, 3, 4, 5, 6};
  std::vector<int> m_list{16, 25, 36};  // perfect squares

  int threads = 0;  // 0: one per hardware thread

  static std::vector<std::uint64_t> default_seeds(int n);

  LinkBudget budget() const;
  ArrayGeometry geometry() const;
  void validate() const;  // throws ConfigError
};

// Applies one `key = value` setting; keys are the lower_snake_case field
// names (dashes accepted in place of underscores).
void apply_setting(ScenarioConfig& config, std::string key, const std::string& value);
// Reads a flat key/value file: one `key = value` per line, '#' comments.
void load_config(ScenarioConfig& config, std::istream& in);
void load_config_file(ScenarioConfig& config, const std::string& path);
// "5" means seeds 0..4; "1,7,9" is an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

// Independent generator per (seed, stream, index).
Rng make_rng(std::uint64_t seed, std::uint32_t stream, std::uint32_t index = 0);

struct Scenario {
  ArrayGeometry geometry;
  Position rms;
  std::vector<UserChannel> channels;
  LinkBudget budget;
};

// User k's position and channel depend only on (seed, k), so sweeps over K,
// M and P_t reuse the same users.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct RunOutcome {
  Algorithm algorithm = Algorithm::proposed;
  TransmissionCoefficients f;
  PowerAllocation p;
  double sum_rate = 0.0;
  double rank_one_gap = 0.0;  // relative; zero for vector-only baselines
  double extraction_change = 0.0;  // |R(f) - R(F)| / R(F) for lifted runs
  double min_qos_slack = 0.0;
  double wall_ms = 0.0;
  AoStatus status = AoStatus::converged;
  std::string diagnostic;
  AoTrace trace;  // empty for ZF and RA
};

RunOutcome run_algorithm(const Scenario& scenario, Algorithm algorithm,
                         const AoConfig& config, std::uint64_t seed);

struct ResultRow {
  std::string scenario;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::proposed;
  std::optional<int> iteration;  // empty: final row
  double sum_rate_bps_hz = 0.0;
  double rank_one_gap = 0.0;
  double min_qos_slack = 0.0;
  double wall_ms = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "scenario,seed,algorithm,iteration,sum_rate_bps_hz,rank_one_gap,min_qos_slack,wall_ms";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  // Per-run solutions, in row order of the final rows.
  struct Solution {
    std::string scenario;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::proposed;
    TransmissionCoefficients f;
    PowerAllocation p;
  };
  std::vector<Solution> solutions;
  int infeasible_runs = 0;
};

// Per P_t in pt_list_dbm: proposed algorithm, one row per outer iteration
// (penalised lifted objective) plus a final row (achieved sum-rate).
ExperimentOutput run_convergence(const ScenarioConfig& config);
// Per K in k_list: final rows for every configured algorithm.
ExperimentOutput run_user_sweep(const ScenarioConfig& config);
// Per M in m_list: final rows for every configured algorithm.
ExperimentOutput run_element_sweep(const ScenarioConfig& config);
// The configured scenario as is: per-iteration and final rows.
ExperimentOutput run_single(const ScenarioConfig& config);

struct SummaryRow {
  std::string scenario;
  Algorithm algorithm = Algorithm::proposed;
  int runs = 0;
  double mean_sum_rate = 0.0;
  double std_error = 0.0;
};

// Mean of the final rows grouped by (scenario, algorithm), in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

// Solution file: "M", "K", scenario id, then M lines "re im" and K lines p_k.
void write_solution(std::ostream& out, const std::string& scenario,
                    const TransmissionCoefficients& f, const PowerAllocation& p);
struct SolutionFile {
  std::string scenario;
  TransmissionCoefficients f;
  PowerAllocation p;
};
SolutionFile read_solution(std::istream& in);

}  // namespace rmstx
