#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trssqp/solver.hpp"
#include "trssqp/types.hpp"

namespace trssqp {

struct MethodSpec {
  std::string label;
  SolverConfig solver;
  OracleConfig oracle;
};

struct ExperimentSpec {
  std::vector<std::string> problems;
  std::vector<MethodSpec> methods;
  std::vector<double> eps_grid;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double eps_pp = 1e-3;
  std::string out_csv = "results.csv";
  std::string out_manifest = "results.json";
};

// One row of the results table (also the aggregate rows, where the seed
// column holds "mean" or "median").
struct ResultRow {
  std::string problem;
  std::string method;
  int alpha = 0;
  double eps = 0.0;
  double eps_f = 0.0, eps_g = 0.0, eps_h = 0.0;
  std::string noise;
  std::string seed;  // integer text, or "mean"/"median" for aggregates
  double T_eps = 0.0;
  std::string status;
  double final_kkt = 0.0;
  double final_tau_plus = 0.0;
  long iters = 0;
  double accept_rate = 0.0;
  double freq_I = 0.0;
  double freq_Theta = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

struct ProfilePoint {
  std::string method;
  double ratio = 1.0;           // >= 1, or infinity for non-convergence
  double fraction_solved = 0.0;
};

struct FrequencyStat {
  std::string method;  // method label, or "pooled" for the combined row
  std::string name;    // indicator: A_k, B_k, C_k, I_k, Theta_k
  double freq = 0.0;
  double ci_low = 0.0;  // Wilson 95% interval
  double ci_high = 0.0;
  long n = 0;
};

/// Parses the flat key-value sweep config (see configs/ for the schema).
ExperimentSpec parse_experiment_config(std::istream& in);
ExperimentSpec parse_experiment_file(const std::string& path);

/// Built-in experiment presets ("stopping-time", "irreducible-default", ...).
ExperimentSpec experiment_preset(const std::string& name);
std::vector<std::string> experiment_preset_names();

/// Runs every (problem, method, eps, seed) cell, appends per-seed rows plus
/// mean/median aggregates, deterministic given the seed list.
ResultTable stopping_time_experiment(const ExperimentSpec& spec,
                                     std::vector<RunRecord>* records = nullptr);

/// First iteration index k whose logged true KKT residual satisfies
/// kkt0 - kkt_k >= (1 - eps_pp)(kkt0 - kkt_best); nullopt when never.
std::optional<long> convergence_metric(const RunRecord& record, double kkt0,
                                       double kkt_best, double eps_pp);

/// Standard performance profile over (problem -> method -> iteration count)
/// with non-convergence mapped to an infinite ratio.
std::vector<ProfilePoint> performance_profile(
    const std::map<std::string, std::map<std::string, double>>& iters_by_problem);

/// Profile curve evaluated from solver records grouped by problem; the best
/// residual per problem is taken across all methods in the group.
std::vector<ProfilePoint> performance_profile_from_records(
    const std::vector<RunRecord>& records, double eps_pp);

/// Empirical frequencies of the A/B/C/I/Theta indicators with Wilson 95%
/// intervals, pooled over all iterations of the given records.
std::vector<FrequencyStat> classification_stats(const std::vector<RunRecord>& records);

// CSV helpers. Writers emit full-precision doubles so a parse round-trips.
void write_results_csv(const ResultTable& table, std::ostream& out);
ResultTable read_results_csv(std::istream& in);
void write_trace_csv(const RunRecord& record, std::ostream& out);
void write_profile_csv(const std::vector<ProfilePoint>& points, std::ostream& out);
void write_manifest_json(const ExperimentSpec& spec, const ResultTable& table,
                         std::ostream& out);
std::string problems_manifest_json();

/// Summary row for a single run (the `run` CLI verb uses this).
ResultRow summarize_run(const RunRecord& record, const std::string& method_label,
                        std::uint64_t seed);

}  // namespace trssqp
