#include "trssqp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "trssqp/errors.hpp"
#include "trssqp/problem.hpp"

namespace trssqp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-cell seed, independent of the seed-list order.
std::uint64_t cell_seed(std::uint64_t seed, const std::string& problem,
                        const std::string& label, double eps) {
  return splitmix64(seed ^ fnv1a(problem + "|" + label + "|" + fmt_double(eps)));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": " + s);
  }
}

long parse_long(const std::string& s, const std::string& key) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": " + s);
  }
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError("invalid boolean for " + key + ": " + s);
}

void apply_method_key(MethodSpec& m, const std::string& key, const std::string& value) {
  auto& s = m.solver;
  auto& o = m.oracle;
  if (key == "alpha") s.alpha = static_cast<int>(parse_long(value, key));
  else if (key == "hessian") s.hessian = hessian_strategy_from_string(value);
  else if (key == "noise") o.noise.family = noise_family_from_string(value);
  else if (key == "sigma") o.noise.sigma = parse_double(value, key);
  else if (key == "mode") {
    if (value == "inject") o.mode = EstimationMode::DirectInject;
    else if (value == "average") o.mode = EstimationMode::SampleAverage;
    else throw ConfigError("mode must be inject or average");
  }
  else if (key == "eps_f") o.eps_f = parse_double(value, key);
  else if (key == "eps_f_tilde") o.eps_f_tilde = parse_double(value, key);
  else if (key == "eps_g") o.eps_g = parse_double(value, key);
  else if (key == "eps_h") o.eps_h = parse_double(value, key);
  else if (key == "kappa_f") o.kappa_f = parse_double(value, key);
  else if (key == "kappa_g") o.kappa_g = parse_double(value, key);
  else if (key == "kappa_h") o.kappa_h = parse_double(value, key);
  else if (key == "p_f") o.p_f = parse_double(value, key);
  else if (key == "p_g") o.p_g = parse_double(value, key);
  else if (key == "p_h") o.p_h = parse_double(value, key);
  else if (key == "C_f") o.C_f = parse_double(value, key);
  else if (key == "C_g") o.C_g = parse_double(value, key);
  else if (key == "C_h") o.C_h = parse_double(value, key);
  else if (key == "n_max") o.n_max = parse_long(value, key);
  else if (key == "inject_irreducible") o.irreducible_injection = parse_bool(value, key);
  else if (key == "eta") s.merit.eta = parse_double(value, key);
  else if (key == "rho") s.merit.rho = parse_double(value, key);
  else if (key == "mu0") s.merit.mu0 = parse_double(value, key);
  else if (key == "kappa_fcd") s.merit.kappa_fcd = parse_double(value, key);
  else if (key == "gamma") s.gamma = parse_double(value, key);
  else if (key == "delta0") s.delta0 = parse_double(value, key);
  else if (key == "delta_max") s.delta_max = parse_double(value, key);
  else if (key == "r") s.soc_trigger = parse_double(value, key);
  else if (key == "soc") s.soc_enabled = parse_bool(value, key);
  else if (key == "ave_window") s.ave_window = static_cast<int>(parse_long(value, key));
  else if (key == "max_iter") s.max_iter = parse_long(value, key);
  else if (key == "kappa_B") s.kappa_B = parse_double(value, key);
  else throw ConfigError("unknown method key: " + key);
}

}  // namespace

ExperimentSpec parse_experiment_config(std::istream& in) {
  ExperimentSpec spec;
  spec.seeds.clear();
  MethodSpec* current = nullptr;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section at line " +
                                                std::to_string(lineno));
      const std::string header = trim(line.substr(1, line.size() - 2));
      if (header.rfind("method", 0) != 0)
        throw ConfigError("unknown section: " + header);
      MethodSpec m;
      m.label = trim(header.substr(6));
      if (m.label.empty()) throw ConfigError("method section needs a label");
      spec.methods.push_back(m);
      current = &spec.methods.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (current != nullptr) {
      apply_method_key(*current, key, value);
      continue;
    }
    if (key == "problems") spec.problems = split_list(value);
    else if (key == "eps") {
      spec.eps_grid.clear();
      for (const auto& item : split_list(value))
        spec.eps_grid.push_back(parse_double(item, key));
    }
    else if (key == "seeds") {
      for (const auto& item : split_list(value))
        spec.seeds.push_back(static_cast<std::uint64_t>(parse_long(item, key)));
    }
    else if (key == "eps_pp") spec.eps_pp = parse_double(value, key);
    else if (key == "out_csv") spec.out_csv = value;
    else if (key == "out_manifest") spec.out_manifest = value;
    else throw ConfigError("unknown global key: " + key);
  }
  if (spec.seeds.empty()) spec.seeds = {1, 2, 3, 4, 5};
  if (spec.problems.empty()) throw ConfigError("config lists no problems");
  if (spec.methods.empty()) throw ConfigError("config lists no methods");
  if (spec.eps_grid.empty()) throw ConfigError("config lists no eps values");
  for (double e : spec.eps_grid)
    if (e <= 0.0) throw ConfigError("eps values must be positive");
  return spec;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_experiment_config(in);
}

namespace {

MethodSpec method_tr_ssqp(const std::string& label, HessianStrategy h, int alpha) {
  MethodSpec m;
  m.label = label;
  m.solver.alpha = alpha;
  m.solver.hessian = h;
  m.oracle.noise.family = NoiseFamily::Gaussian;
  m.oracle.noise.sigma = 1e-2;
  return m;
}

// Sample-average estimates keep the reducible noise well under the injected
// floor. Targets below the floor take an order of magnitude longer to hit
// than targets above it, so the budget separates the two regimes.
void set_irreducible(MethodSpec& m, double eps_f, double eps_g, double eps_h) {
  m.oracle.eps_f = eps_f;
  m.oracle.eps_f_tilde = eps_f;
  m.oracle.eps_g = eps_g;
  m.oracle.eps_h = eps_h;
  m.oracle.irreducible_injection = true;
  m.oracle.mode = EstimationMode::SampleAverage;
  m.solver.max_iter = 150;
}

}  // namespace

ExperimentSpec experiment_preset(const std::string& name) {
  ExperimentSpec spec;
  if (name == "stopping-time") {
    // No irreducible noise; problems whose null space sees the shared-scalar
    // gradient noise, so the stopping time scales with the target accuracy.
    spec.problems = {"quad-3lin", "quad-10d", "aniso-12d"};
    spec.eps_grid = {1e-1, 1e-2, 1e-3};
    MethodSpec m = method_tr_ssqp("tr-ssqp-esth", HessianStrategy::EstH, 0);
    m.solver.max_iter = 50000;
    spec.methods = {m};
    spec.out_csv = "stopping_time.csv";
    spec.out_manifest = "stopping_time.json";
    return spec;
  }
  if (name == "irreducible-default" || name == "irreducible-eps-f" ||
      name == "irreducible-eps-g" || name == "irreducible-eps-h") {
    spec.problems = {"quad-linear", "rosenbrock-sphere", "saddle",
                     "maratos",     "tilted-circle",     "quad-3lin",
                     "quad-10d"};
    spec.eps_grid = {1e-2};
    auto push = [&](const std::string& label, int alpha, HessianStrategy h,
                    double ef, double eg, double eh) {
      MethodSpec m = method_tr_ssqp(label, h, alpha);
      set_irreducible(m, ef, eg, eh);
      spec.methods.push_back(m);
    };
    if (name == "irreducible-default") {
      spec.eps_grid = {1e-1, 1e-2, 1e-3};
      push("tr-ssqp-esth", 0, HessianStrategy::EstH, 1e-4, 1e-2, 1e-2);
      push("tr-ssqp2", 1, HessianStrategy::EstH, 1e-4, 1e-2, 1e-2);
    } else if (name == "irreducible-eps-f") {
      for (double ef : {1e-3, 1e-4, 1e-5})
        push("tr-ssqp-esth-epsf" + fmt_double(ef), 0, HessianStrategy::EstH, ef, 1e-2, 1e-2);
    } else if (name == "irreducible-eps-g") {
      for (double eg : {1e-1, 1e-2, 1e-3})
        push("tr-ssqp-esth-epsg" + fmt_double(eg), 0, HessianStrategy::EstH, 1e-4, eg, 1e-2);
    } else {
      for (double eh : {1e-1, 1e-2, 1e-3})
        push("tr-ssqp2-epsh" + fmt_double(eh), 1, HessianStrategy::EstH, 1e-4, 1e-2, eh);
    }
    spec.out_csv = name + ".csv";
    spec.out_manifest = name + ".json";
    return spec;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> experiment_preset_names() {
  return {"stopping-time", "irreducible-default", "irreducible-eps-f",
          "irreducible-eps-g", "irreducible-eps-h"};
}

namespace {

std::string status_text(const RunRecord& rec) {
  switch (rec.status) {
    case RunStatus::Stopped: return "Stopped";
    case RunStatus::BudgetExhausted: return "BudgetExhausted";
    case RunStatus::Error: return "Error";
  }
  return "Error";
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

ResultRow summarize_run(const RunRecord& rec, const std::string& label,
                        std::uint64_t seed) {
  ResultRow row;
  row.problem = rec.problem;
  row.method = label;
  row.alpha = rec.solver_cfg.alpha;
  row.eps = rec.solver_cfg.eps_stop;
  row.eps_f = rec.oracle_cfg.eps_f;
  row.eps_g = rec.oracle_cfg.eps_g;
  row.eps_h = rec.oracle_cfg.eps_h;
  row.noise = to_string(rec.oracle_cfg.noise.family);
  row.seed = std::to_string(seed);
  row.T_eps = rec.stopped() ? static_cast<double>(rec.stopping_time)
                            : static_cast<double>(rec.solver_cfg.max_iter);
  row.status = status_text(rec);
  row.final_kkt = rec.final_kkt;
  row.final_tau_plus = rec.final_tau_plus;
  row.iters = static_cast<long>(rec.logs.size());
  long acc = 0, freq_i = 0, freq_t = 0;
  for (const auto& log : rec.logs) {
    acc += log.accepted;
    freq_i += log.I_k;
    freq_t += log.accepted && log.cond_b;
  }
  const double n = rec.logs.empty() ? 1.0 : static_cast<double>(rec.logs.size());
  row.accept_rate = acc / n;
  row.freq_I = freq_i / n;
  row.freq_Theta = freq_t / n;
  return row;
}

ResultTable stopping_time_experiment(const ExperimentSpec& spec,
                                     std::vector<RunRecord>* records) {
  struct Cell {
    std::string problem;
    const MethodSpec* method;
    double eps;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& problem : spec.problems)
    for (const auto& method : spec.methods)
      for (double eps : spec.eps_grid)
        for (std::uint64_t seed : spec.seeds) cells.push_back({problem, &method, eps, seed});

  // Cells are independent; run them concurrently and reduce in the canonical
  // (problem, method, eps, seed) order so the table is schedule-independent.
  auto run_cell = [](const Cell& cell) {
    SolverConfig scfg = cell.method->solver;
    scfg.eps_stop = cell.eps;
    RunRecord rec;
    try {
      const ProblemModel model = make_problem(cell.problem);
      rec = run(model, cell.method->oracle, scfg,
                cell_seed(cell.seed, cell.problem, cell.method->label, cell.eps));
    } catch (const SolverError& e) {
      rec.problem = cell.problem;
      rec.solver_cfg = scfg;
      rec.oracle_cfg = cell.method->oracle;
      rec.status = RunStatus::Error;
      rec.error_kind = e.what();
    }
    return rec;
  };

  const size_t workers =
      std::max<size_t>(1, std::min<size_t>(std::thread::hardware_concurrency(), cells.size()));
  std::vector<RunRecord> results(cells.size());
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
        results[i] = run_cell(cells[i]);
    });
  }
  for (auto& t : pool) t.join();

  ResultTable table;
  size_t idx = 0;
  for (const auto& problem : spec.problems) {
    (void)problem;
    for (const auto& method : spec.methods) {
      for (double eps : spec.eps_grid) {
        (void)eps;
        std::vector<double> t_values;
        for (std::uint64_t seed : spec.seeds) {
          RunRecord& rec = results[idx++];
          ResultRow row = summarize_run(rec, method.label, seed);
          t_values.push_back(row.T_eps);
          table.rows.push_back(row);
          if (records != nullptr) records->push_back(std::move(rec));
        }
        ResultRow agg = table.rows.back();
        agg.status = "-";
        agg.final_kkt = agg.final_tau_plus = 0.0;
        agg.iters = 0;
        agg.accept_rate = agg.freq_I = agg.freq_Theta = 0.0;
        agg.seed = "mean";
        agg.T_eps = mean(t_values);
        table.rows.push_back(agg);
        agg.seed = "median";
        agg.T_eps = median(t_values);
        table.rows.push_back(agg);
      }
    }
  }
  return table;
}

std::optional<long> convergence_metric(const RunRecord& record, double kkt0,
                                       double kkt_best, double eps_pp) {
  const double target = (1.0 - eps_pp) * (kkt0 - kkt_best);
  long k = 0;
  for (const auto& log : record.logs) {
    if (kkt0 - log.kkt_true >= target) return k;
    ++k;
  }
  if (record.status != RunStatus::Error && kkt0 - record.final_kkt >= target) return k;
  return std::nullopt;
}

std::vector<ProfilePoint> performance_profile(
    const std::map<std::string, std::map<std::string, double>>& iters_by_problem) {
  if (iters_by_problem.empty()) throw EmptyGroup();

  std::map<std::string, std::vector<double>> ratios;  // method -> per-problem ratio
  for (const auto& [problem, by_method] : iters_by_problem) {
    (void)problem;
    if (by_method.empty()) throw EmptyGroup();
    double best = kInf;
    for (const auto& [_, iters] : by_method) best = std::min(best, iters);
    for (const auto& [method, iters] : by_method) {
      double ratio;
      if (std::isinf(iters)) ratio = kInf;
      else if (best == 0.0) ratio = iters == 0.0 ? 1.0 : kInf;
      else ratio = iters / best;
      ratios[method].push_back(ratio);
    }
  }

  std::vector<ProfilePoint> points;
  for (auto& [method, rs] : ratios) {
    std::sort(rs.begin(), rs.end());
    const double n = static_cast<double>(rs.size());
    size_t i = 0;
    while (i < rs.size()) {
      size_t j = i;
      while (j < rs.size() && rs[j] == rs[i]) ++j;
      points.push_back({method, rs[i], static_cast<double>(j) / n});
      i = j;
    }
  }
  return points;
}

std::vector<ProfilePoint> performance_profile_from_records(
    const std::vector<RunRecord>& records, double eps_pp) {
  // Best residual per problem across every method and seed, then the first
  // iteration meeting the convergence metric per (problem, method).
  std::map<std::string, double> kkt0;
  std::map<std::string, double> kkt_best;
  for (const auto& rec : records) {
    const double start = rec.logs.empty() ? rec.final_kkt : rec.logs.front().kkt_true;
    if (!kkt0.count(rec.problem)) kkt0[rec.problem] = start;
    double best = rec.final_kkt;
    for (const auto& log : rec.logs) best = std::min(best, log.kkt_true);
    auto it = kkt_best.find(rec.problem);
    if (it == kkt_best.end() || best < it->second) kkt_best[rec.problem] = best;
  }

  std::map<std::string, std::map<std::string, std::vector<double>>> counts;
  for (const auto& rec : records) {
    const std::string method = to_string(rec.solver_cfg.hessian) + "-a" +
                               std::to_string(rec.solver_cfg.alpha);
    const auto hit = convergence_metric(rec, kkt0[rec.problem], kkt_best[rec.problem],
                                        eps_pp);
    counts[rec.problem][method].push_back(
        hit ? static_cast<double>(*hit) : kInf);
  }

  std::map<std::string, std::map<std::string, double>> iters;
  for (const auto& [problem, by_method] : counts)
    for (const auto& [method, v] : by_method) iters[problem][method] = median(v);
  return performance_profile(iters);
}

std::vector<FrequencyStat> classification_stats(const std::vector<RunRecord>& records) {
  struct Counts {
    long n = 0, a = 0, b = 0, c = 0, i = 0, theta = 0;
  };
  std::map<std::string, Counts> by_method;
  for (const auto& rec : records) {
    const std::string method = to_string(rec.solver_cfg.hessian) + "-a" +
                               std::to_string(rec.solver_cfg.alpha);
    for (const auto& log : rec.logs) {
      for (const std::string& key : {method, std::string("pooled")}) {
        Counts& ct = by_method[key];
        ++ct.n;
        ct.a += log.A_k;
        ct.b += log.B_k;
        ct.c += log.C_k;
        ct.i += log.I_k;
        ct.theta += log.accepted && log.cond_b;
      }
    }
  }
  if (by_method.empty() || by_method["pooled"].n == 0) throw DiagnosticsUnavailable();

  auto wilson = [](const std::string& method, const std::string& name, long hits, long n) {
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double nn = static_cast<double>(n);
    const double phat = hits / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = (phat + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
    return FrequencyStat{method, name, phat, center - half, center + half, n};
  };
  std::vector<FrequencyStat> stats;
  for (const auto& [method, ct] : by_method) {
    stats.push_back(wilson(method, "A_k", ct.a, ct.n));
    stats.push_back(wilson(method, "B_k", ct.b, ct.n));
    stats.push_back(wilson(method, "C_k", ct.c, ct.n));
    stats.push_back(wilson(method, "I_k", ct.i, ct.n));
    stats.push_back(wilson(method, "Theta_k", ct.theta, ct.n));
  }
  return stats;
}

void write_results_csv(const ResultTable& table, std::ostream& out) {
  out << "problem,method,alpha,eps,eps_f,eps_g,eps_h,noise,seed,T_eps,status,"
         "final_kkt,final_tau_plus,iters,accept_rate,freq_I,freq_Theta\n";
  for (const auto& r : table.rows) {
    out << r.problem << ',' << r.method << ',' << r.alpha << ',' << fmt_double(r.eps)
        << ',' << fmt_double(r.eps_f) << ',' << fmt_double(r.eps_g) << ','
        << fmt_double(r.eps_h) << ',' << r.noise << ',' << r.seed << ','
        << fmt_double(r.T_eps) << ',' << r.status << ',' << fmt_double(r.final_kkt)
        << ',' << fmt_double(r.final_tau_plus) << ',' << r.iters << ','
        << fmt_double(r.accept_rate) << ',' << fmt_double(r.freq_I) << ','
        << fmt_double(r.freq_Theta) << '\n';
  }
}

ResultTable read_results_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty results CSV");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 17) throw ConfigError("results CSV row has " +
                                          std::to_string(f.size()) + " fields");
    ResultRow r;
    r.problem = f[0];
    r.method = f[1];
    r.alpha = static_cast<int>(parse_long(f[2], "alpha"));
    r.eps = parse_double(f[3], "eps");
    r.eps_f = parse_double(f[4], "eps_f");
    r.eps_g = parse_double(f[5], "eps_g");
    r.eps_h = parse_double(f[6], "eps_h");
    r.noise = f[7];
    r.seed = f[8];
    r.T_eps = parse_double(f[9], "T_eps");
    r.status = f[10];
    r.final_kkt = parse_double(f[11], "final_kkt");
    r.final_tau_plus = parse_double(f[12], "final_tau_plus");
    r.iters = parse_long(f[13], "iters");
    r.accept_rate = parse_double(f[14], "accept_rate");
    r.freq_I = parse_double(f[15], "freq_I");
    r.freq_Theta = parse_double(f[16], "freq_Theta");
    table.rows.push_back(r);
  }
  return table;
}

void write_trace_csv(const RunRecord& rec, std::ostream& out) {
  out << "k,delta,mu,kkt_true,tau_plus_true,step_kind,soc,accepted,radius_grew,"
         "pred,ared,A_k,B_k,C_k,I_k,n_samples\n";
  for (const auto& log : rec.logs) {
    out << log.k << ',' << fmt_double(log.delta) << ',' << fmt_double(log.mu) << ','
        << fmt_double(log.kkt_true) << ',' << fmt_double(log.tau_plus_true) << ','
        << (log.step_kind == StepKind::Gradient ? "gradient" : "eigen") << ','
        << log.soc_performed << ',' << log.accepted << ',' << log.radius_grew << ','
        << fmt_double(log.pred) << ',' << fmt_double(log.ared) << ',' << log.A_k << ','
        << log.B_k << ',' << log.C_k << ',' << log.I_k << ',' << log.n_samples << '\n';
  }
}

void write_profile_csv(const std::vector<ProfilePoint>& points, std::ostream& out) {
  out << "method,ratio,fraction_solved\n";
  for (const auto& p : points)
    out << p.method << ',' << (std::isinf(p.ratio) ? "inf" : fmt_double(p.ratio)) << ','
        << fmt_double(p.fraction_solved) << '\n';
}

std::string problems_manifest_json() {
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& key : problem_catalog_keys()) {
    const ProblemModel p = make_problem(key);
    nlohmann::json entry;
    entry["name"] = p.name;
    entry["d"] = p.dim;
    entry["m"] = p.n_eq;
    entry["x0"] = std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size());
    entry["convergence_suite"] = p.convergence_suite;
    if (p.f_inf_hint) entry["f_inf_hint"] = *p.f_inf_hint;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& sp : p.known_points) {
      nlohmann::json q;
      q["x"] = std::vector<double>(sp.x.data(), sp.x.data() + sp.x.size());
      q["lambda"] = std::vector<double>(sp.lambda.data(), sp.lambda.data() + sp.lambda.size());
      q["second_order"] = sp.second_order;
      q["note"] = sp.note;
      pts.push_back(q);
    }
    entry["stationary_points"] = pts;
    manifest.push_back(entry);
  }
  return manifest.dump(2);
}

void write_manifest_json(const ExperimentSpec& spec, const ResultTable& table,
                         std::ostream& out) {
  nlohmann::json j;
  j["problems"] = spec.problems;
  j["eps_grid"] = spec.eps_grid;
  j["seeds"] = spec.seeds;
  j["eps_pp"] = spec.eps_pp;
  j["out_csv"] = spec.out_csv;
  j["rows"] = table.rows.size();
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : spec.methods) {
    nlohmann::json mj;
    mj["label"] = m.label;
    mj["alpha"] = m.solver.alpha;
    mj["hessian"] = to_string(m.solver.hessian);
    mj["noise"] = to_string(m.oracle.noise.family);
    mj["sigma"] = m.oracle.noise.sigma;
    mj["mode"] = m.oracle.mode == EstimationMode::SampleAverage ? "average" : "inject";
    mj["eps_f"] = m.oracle.eps_f;
    mj["eps_g"] = m.oracle.eps_g;
    mj["eps_h"] = m.oracle.eps_h;
    mj["max_iter"] = m.solver.max_iter;
    methods.push_back(mj);
  }
  j["methods"] = methods;
  j["catalog"] = nlohmann::json::parse(problems_manifest_json());
  out << j.dump(2) << '\n';
}

}  // namespace trssqp
