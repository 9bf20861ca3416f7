#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrem/analytics.hpp"
#include "qrem/errors.hpp"
#include "qrem/geometry.hpp"
#include "qrem/io.hpp"
#include "qrem/model.hpp"
#include "qrem/parallel.hpp"
#include "qrem/rng.hpp"
#include "qrem/spectral.hpp"

namespace qrem::sweep {

enum class OutputFormat { kCsv, kJson };
enum class MethodPolicy { kDense, kClassical, kSlq, kAuto };

inline std::string to_string(OutputFormat f) {
  return f == OutputFormat::kCsv ? "csv" : "json";
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  throw config_error("unknown output format '" + s + "'");
}

inline std::string to_string(MethodPolicy m) {
  switch (m) {
    case MethodPolicy::kDense: return "dense";
    case MethodPolicy::kClassical: return "classical";
    case MethodPolicy::kSlq: return "slq";
    case MethodPolicy::kAuto: return "auto";
  }
  return "auto";
}

inline MethodPolicy parse_method(const std::string& s) {
  if (s == "dense") return MethodPolicy::kDense;
  if (s == "classical") return MethodPolicy::kClassical;
  if (s == "slq") return MethodPolicy::kSlq;
  if (s == "auto") return MethodPolicy::kAuto;
  throw config_error("unknown method '" + s + "'");
}

/// Full description of an ensemble run. Grids, realization count, seeding,
/// method policy, and output routing.
struct SweepConfig {
  std::vector<int> n_list;
  InteractionOrder order = InteractionOrder::infinite();
  std::vector<double> beta_grid;
  std::vector<double> gamma_grid;
  std::vector<double> eps_grid;
  int num_realizations = 1;
  std::uint64_t base_seed = 0;
  int dense_cutoff = 12;
  MethodPolicy method = MethodPolicy::kAuto;
  SlqConfig slq;
  int num_threads = 1;
  std::string out_path;
  OutputFormat format = OutputFormat::kCsv;

  void validate() const {
    if (n_list.empty()) throw config_error("config: n_list must be nonempty");
    for (int n : n_list) {
      if (n < 1) throw config_error("config: spin counts must be >= 1");
    }
    if (num_realizations < 1) {
      throw config_error("config: num_realizations must be >= 1");
    }
    if (dense_cutoff < 1 || dense_cutoff > kMaxDenseSpins) {
      throw config_error("config: dense_cutoff must be in [1, 14]");
    }
    if (num_threads < 1) throw config_error("config: num_threads must be >= 1");
    slq.validate();
    if (method == MethodPolicy::kClassical) {
      for (double g : gamma_grid) {
        if (g != 0.0) {
          throw config_error("config: classical method requires gamma = 0");
        }
      }
    }
  }
};

inline nlohmann::ordered_json config_to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["n_list"] = cfg.n_list;
  doc["p"] = to_string(cfg.order);
  doc["beta_grid"] = cfg.beta_grid;
  doc["gamma_grid"] = cfg.gamma_grid;
  doc["eps_grid"] = cfg.eps_grid;
  doc["num_realizations"] = cfg.num_realizations;
  doc["base_seed"] = cfg.base_seed;
  doc["dense_cutoff"] = cfg.dense_cutoff;
  doc["method"] = to_string(cfg.method);
  doc["slq"] = {{"num_probes", cfg.slq.num_probes},
                {"lanczos_steps", cfg.slq.lanczos_steps},
                {"seed", cfg.slq.seed}};
  doc["num_threads"] = cfg.num_threads;
  doc["out"] = cfg.out_path;
  doc["format"] = to_string(cfg.format);
  return doc;
}

inline SweepConfig config_from_json(const nlohmann::json& doc) {
  SweepConfig cfg;
  try {
    if (doc.contains("n_list")) cfg.n_list = doc.at("n_list").get<std::vector<int>>();
    if (doc.contains("p")) cfg.order = order_from_json(doc.at("p"));
    if (doc.contains("beta_grid")) {
      cfg.beta_grid = doc.at("beta_grid").get<std::vector<double>>();
    }
    if (doc.contains("gamma_grid")) {
      cfg.gamma_grid = doc.at("gamma_grid").get<std::vector<double>>();
    }
    if (doc.contains("eps_grid")) {
      cfg.eps_grid = doc.at("eps_grid").get<std::vector<double>>();
    }
    if (doc.contains("num_realizations")) {
      cfg.num_realizations = doc.at("num_realizations").get<int>();
    }
    if (doc.contains("base_seed")) {
      cfg.base_seed = doc.at("base_seed").get<std::uint64_t>();
    }
    if (doc.contains("dense_cutoff")) {
      cfg.dense_cutoff = doc.at("dense_cutoff").get<int>();
    }
    if (doc.contains("method")) {
      cfg.method = parse_method(doc.at("method").get<std::string>());
    }
    if (doc.contains("slq")) {
      const auto& s = doc.at("slq");
      if (s.contains("num_probes")) cfg.slq.num_probes = s.at("num_probes").get<int>();
      if (s.contains("lanczos_steps")) {
        cfg.slq.lanczos_steps = s.at("lanczos_steps").get<int>();
      }
      if (s.contains("seed")) cfg.slq.seed = s.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("num_threads")) {
      cfg.num_threads = doc.at("num_threads").get<int>();
    }
    if (doc.contains("out")) cfg.out_path = doc.at("out").get<std::string>();
    if (doc.contains("format")) {
      cfg.format = parse_format(doc.at("format").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

/// Hash of everything that affects row contents (presentation fields —
/// output path, format, thread count — deliberately excluded, so reruns
/// with different worker counts share the hash).
inline std::uint64_t config_hash(const SweepConfig& cfg) {
  auto doc = config_to_json(cfg);
  doc.erase("num_threads");
  doc.erase("out");
  doc.erase("format");
  const std::string canon = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-realization seed: a stated 64-bit mix of (base_seed, index),
/// recorded in every output row.
inline std::uint64_t realization_seed(std::uint64_t base_seed, std::uint64_t i) {
  return rng::derive_key(base_seed, rng::Stream::kRealization, i);
}

struct GridPointStat {
  int n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  int realizations = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double reference = 0.0;
  double gap = 0.0;
};

struct TailPoint {
  int n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  double t = 0.0;
  double fraction = 0.0;
};

struct StdRatio {
  double beta = 0.0;
  double gamma = 0.0;
  int n_small = 0;
  int n_large = 0;
  double std_small = 0.0;
  double std_large = 0.0;
  double ratio = 0.0;
};

struct ClusterPointStat {
  int n = 0;
  double eps = 0.0;
  int k_eps = 0;
  int realizations = 0;
  double omega_frequency = 0.0;
  double norm_ok_fraction = 0.0;
  std::map<std::uint64_t, int> max_size_histogram;
  std::map<std::uint64_t, int> component_size_histogram;
};

/// Aggregated view of one run; sections are filled per runner.
struct EnsembleSummary {
  std::vector<GridPointStat> pressure_stats;
  std::vector<TailPoint> tail;
  std::vector<StdRatio> std_ratios;
  std::vector<ClusterPointStat> cluster_stats;
  double min_slack_classical = std::numeric_limits<double>::quiet_NaN();
  double min_slack_para = std::numeric_limits<double>::quiet_NaN();
  double min_slack_gt = std::numeric_limits<double>::quiet_NaN();
  double max_boundary_diff = std::numeric_limits<double>::quiet_NaN();

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    if (!pressure_stats.empty()) {
      auto& arr = doc["pressure_stats"] = nlohmann::ordered_json::array();
      for (const auto& s : pressure_stats) {
        arr.push_back({{"N", s.n},
                       {"beta", s.beta},
                       {"gamma", s.gamma},
                       {"realizations", s.realizations},
                       {"mean", s.mean},
                       {"std", s.std_dev},
                       {"reference", s.reference},
                       {"gap", s.gap}});
      }
    }
    if (!tail.empty()) {
      auto& arr = doc["tail"] = nlohmann::ordered_json::array();
      for (const auto& t : tail) {
        arr.push_back({{"N", t.n},
                       {"beta", t.beta},
                       {"gamma", t.gamma},
                       {"t", t.t},
                       {"fraction", t.fraction}});
      }
    }
    if (!std_ratios.empty()) {
      auto& arr = doc["std_ratios"] = nlohmann::ordered_json::array();
      for (const auto& r : std_ratios) {
        arr.push_back({{"beta", r.beta},
                       {"gamma", r.gamma},
                       {"n_small", r.n_small},
                       {"n_large", r.n_large},
                       {"std_small", r.std_small},
                       {"std_large", r.std_large},
                       {"ratio", r.ratio}});
      }
    }
    if (!cluster_stats.empty()) {
      auto& arr = doc["cluster_stats"] = nlohmann::ordered_json::array();
      for (const auto& c : cluster_stats) {
        nlohmann::ordered_json entry{{"N", c.n},
                                     {"eps", c.eps},
                                     {"k_eps", c.k_eps},
                                     {"realizations", c.realizations},
                                     {"omega_frequency", c.omega_frequency},
                                     {"norm_ok_fraction", c.norm_ok_fraction}};
        auto& hmax = entry["max_size_histogram"] = nlohmann::ordered_json::object();
        for (const auto& [size, count] : c.max_size_histogram) {
          hmax[std::to_string(size)] = count;
        }
        auto& hall = entry["component_size_histogram"] =
            nlohmann::ordered_json::object();
        for (const auto& [size, count] : c.component_size_histogram) {
          hall[std::to_string(size)] = count;
        }
        arr.push_back(std::move(entry));
      }
    }
    if (!std::isnan(min_slack_classical)) {
      doc["min_slack_classical"] = min_slack_classical;
      doc["min_slack_para"] = min_slack_para;
      doc["min_slack_gt"] = min_slack_gt;
    }
    if (!std::isnan(max_boundary_diff)) {
      doc["max_boundary_diff"] = max_boundary_diff;
    }
    return doc;
  }
};

/// Rows plus summary of one runner invocation. Row order is fixed by the
/// grid, never by scheduling, so serialized output is byte-identical
/// across worker counts.
struct RunOutput {
  EnsembleSummary summary;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string header_comment;

  std::string rows_text(OutputFormat format) const {
    return format == OutputFormat::kCsv ? rows_to_csv(rows, header_comment)
                                        : rows_to_json_doc(rows, header_comment);
  }

  nlohmann::ordered_json summary_doc() const {
    nlohmann::ordered_json doc;
    doc["header"] = header_comment;
    doc["summary"] = summary.to_json();
    return doc;
  }
};

/// Writes the rows file at cfg.out_path and the summary next to it
/// (<out>.summary.json). No-op when out_path is empty.
inline void write_outputs(const SweepConfig& cfg, const RunOutput& out) {
  if (cfg.out_path.empty()) return;
  write_text_file(cfg.out_path, out.rows_text(cfg.format));
  write_text_file(cfg.out_path + ".summary.json", out.summary_doc().dump(1) + "\n");
}

namespace detail {

inline std::string header_comment(const SweepConfig& cfg) {
  return std::string("qrem v") + kVersion + " config=" +
         format_hex(config_hash(cfg));
}

inline DisorderField sample_field(const SweepConfig& cfg, int n,
                                  std::uint64_t seed) {
  return cfg.order.is_finite() ? sample_pspin_field(n, cfg.order.value(), seed)
                               : sample_rem_field(n, seed);
}

inline PressureMethod resolve_method(const SweepConfig& cfg, int n) {
  switch (cfg.method) {
    case MethodPolicy::kDense: return PressureMethod::kExactDense;
    case MethodPolicy::kClassical: return PressureMethod::kExactClassical;
    case MethodPolicy::kSlq: return PressureMethod::kSlq;
    case MethodPolicy::kAuto:
      return n <= cfg.dense_cutoff ? PressureMethod::kExactDense
                                   : PressureMethod::kSlq;
  }
  return PressureMethod::kExactDense;
}

/// Pressure records for one (field, gamma) pair over the whole beta grid.
/// Dense and SLQ both factor the expensive spectral work out of the
/// beta loop.
inline std::vector<PressureRecord> pressures_over_betas(
    const SweepConfig& cfg, const DisorderField& field, double gamma,
    std::size_t grid_index) {
  const PressureMethod method = resolve_method(cfg, field.num_spins());
  std::vector<PressureRecord> records;
  records.reserve(cfg.beta_grid.size());
  switch (method) {
    case PressureMethod::kExactDense: {
      const QremOperator op(gamma, field);
      if (field.num_spins() > kMaxDenseSpins) {
        throw capacity_error("sweep: N=" + std::to_string(field.num_spins()) +
                             " exceeds the dense limit");
      }
      const auto spectrum = dense_spectrum(op);
      for (double beta : cfg.beta_grid) {
        records.push_back(PressureRecord{
            field.num_spins(), field.order(), field.seed(), beta, gamma,
            PressureMethod::kExactDense,
            pressure_from_levels(spectrum, beta, field.num_spins()), 0.0});
      }
      return records;
    }
    case PressureMethod::kExactClassical: {
      for (double beta : cfg.beta_grid) {
        records.push_back(pressure_exact_classical(field, beta));
      }
      return records;
    }
    case PressureMethod::kSlq: {
      const QremOperator op(gamma, field);
      SlqConfig slq = cfg.slq;
      slq.seed = rng::derive_key(field.seed(), rng::Stream::kSlqRun, grid_index);
      const auto rules = slq_probe_quadratures(op, slq);
      for (double beta : cfg.beta_grid) {
        records.push_back(pressure_from_quadratures(op, beta, rules));
      }
      return records;
    }
  }
  throw config_error("sweep: unreachable method");
}

inline double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
}

inline double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace detail

/// Finite-N pressures across the (N, beta, Gamma) grid with the
/// Goldschmidt reference and phase label per row; per-point ensemble
/// statistics in the summary.
inline RunOutput run_phase_diagram(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.beta_grid.empty() || cfg.gamma_grid.empty()) {
    throw config_error("phase-diagram: beta and gamma grids must be nonempty");
  }
  const std::size_t num_n = cfg.n_list.size();
  const auto reals = static_cast<std::size_t>(cfg.num_realizations);
  const std::size_t b = cfg.beta_grid.size();
  const std::size_t g = cfg.gamma_grid.size();
  const std::size_t tasks = num_n * reals;

  std::vector<std::vector<PressureRecord>> slots(tasks);
  parallel_for(tasks, cfg.num_threads, [&](std::size_t task) {
    const int n = cfg.n_list[task / reals];
    const std::size_t r = task % reals;
    const std::uint64_t seed = realization_seed(cfg.base_seed, r);
    try {
      const auto field = detail::sample_field(cfg, n, seed);
      auto& out = slots[task];
      out.reserve(g * b);
      for (std::size_t gi = 0; gi < g; ++gi) {
        auto records =
            detail::pressures_over_betas(cfg, field, cfg.gamma_grid[gi], gi);
        out.insert(out.end(), records.begin(), records.end());
      }
    } catch (const capacity_error& e) {
      throw capacity_error(std::string(e.what()) + " [N=" + std::to_string(n) +
                           ", realization=" + std::to_string(r) + "]");
    }
  });

  RunOutput out;
  out.header_comment = detail::header_comment(cfg);
  for (const auto& slot : slots) {
    for (const auto& rec : slot) {
      auto row = record_to_json(rec);
      const double ref = goldschmidt_pressure(rec.beta, rec.gamma);
      row["reference"] = ref;
      row["gap"] = std::abs(rec.value - ref);
      row["phase"] = qrem::to_string(classify_phase(rec.beta, rec.gamma).phase);
      out.rows.push_back(std::move(row));
    }
  }

  for (std::size_t ni = 0; ni < num_n; ++ni) {
    for (std::size_t gi = 0; gi < g; ++gi) {
      for (std::size_t bi = 0; bi < b; ++bi) {
        std::vector<double> values;
        values.reserve(reals);
        for (std::size_t r = 0; r < reals; ++r) {
          values.push_back(slots[ni * reals + r][gi * b + bi].value);
        }
        GridPointStat stat;
        stat.n = cfg.n_list[ni];
        stat.beta = cfg.beta_grid[bi];
        stat.gamma = cfg.gamma_grid[gi];
        stat.realizations = static_cast<int>(reals);
        stat.mean = detail::sample_mean(values);
        stat.std_dev = detail::sample_std(values, stat.mean);
        stat.reference = goldschmidt_pressure(stat.beta, stat.gamma);
        stat.gap = std::abs(stat.mean - stat.reference);
        out.summary.pressure_stats.push_back(stat);
      }
    }
  }
  return out;
}

/// Ensemble fluctuation study: per-point standard deviations, the
/// large-vs-small-N std ratio, and the empirical tail of
/// P(|p - mean| > t beta / sqrt(N)).
inline RunOutput run_self_averaging(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.num_realizations < 50) {
    throw config_error("self-averaging: need at least 50 realizations");
  }
  if (cfg.beta_grid.empty() || cfg.gamma_grid.empty()) {
    throw config_error("self-averaging: beta and gamma grids must be nonempty");
  }
  // The pressure rows are those of the phase-diagram runner; the summary
  // adds the fluctuation statistics.
  auto out = run_phase_diagram(cfg);
  const std::size_t b = cfg.beta_grid.size();
  const std::size_t g = cfg.gamma_grid.size();
  const auto reals = static_cast<std::size_t>(cfg.num_realizations);

  std::vector<double> t_grid;
  for (int i = 0; i <= 16; ++i) t_grid.push_back(0.25 * i);

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    for (std::size_t gi = 0; gi < g; ++gi) {
      for (std::size_t bi = 0; bi < b; ++bi) {
        const double beta = cfg.beta_grid[bi];
        const double gamma = cfg.gamma_grid[gi];
        std::vector<double> values;
        values.reserve(reals);
        const std::size_t row0 = (ni * reals) * (g * b) + gi * b + bi;
        for (std::size_t r = 0; r < reals; ++r) {
          values.push_back(
              out.rows[row0 + r * (g * b)]["value"].get<double>());
        }
        const double mean = detail::sample_mean(values);
        const double scale = beta / std::sqrt(static_cast<double>(n));
        for (double t : t_grid) {
          int exceed = 0;
          for (double v : values) {
            if (std::abs(v - mean) > t * scale) ++exceed;
          }
          out.summary.tail.push_back(TailPoint{
              n, beta, gamma, t, exceed / static_cast<double>(reals)});
        }
      }
    }
  }

  const auto [n_min_it, n_max_it] =
      std::minmax_element(cfg.n_list.begin(), cfg.n_list.end());
  if (*n_min_it != *n_max_it) {
    for (std::size_t gi = 0; gi < g; ++gi) {
      for (std::size_t bi = 0; bi < b; ++bi) {
        auto std_of = [&](int n) {
          for (const auto& s : out.summary.pressure_stats) {
            if (s.n == n && s.beta == cfg.beta_grid[bi] &&
                s.gamma == cfg.gamma_grid[gi]) {
              return s.std_dev;
            }
          }
          return std::numeric_limits<double>::quiet_NaN();
        };
        StdRatio ratio;
        ratio.beta = cfg.beta_grid[bi];
        ratio.gamma = cfg.gamma_grid[gi];
        ratio.n_small = *n_min_it;
        ratio.n_large = *n_max_it;
        ratio.std_small = std_of(*n_min_it);
        ratio.std_large = std_of(*n_max_it);
        ratio.ratio = ratio.std_large / ratio.std_small;
        out.summary.std_ratios.push_back(ratio);
      }
    }
  }
  return out;
}

/// Large-deviation cluster statistics: omega-event frequency, component
/// size histograms, and the exact-vs-bound remainder norm scatter.
inline RunOutput run_cluster_study(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.eps_grid.empty()) {
    throw config_error("clusters: eps grid must be nonempty");
  }
  const std::size_t num_n = cfg.n_list.size();
  const auto reals = static_cast<std::size_t>(cfg.num_realizations);
  const std::size_t e = cfg.eps_grid.size();
  const std::size_t tasks = num_n * reals;

  struct ClusterRow {
    int n;
    std::uint64_t seed;
    double eps;
    std::uint64_t ld_size;
    std::uint64_t num_components;
    std::uint64_t max_component;
    int k_eps;
    bool omega;
    double a_norm_exact;
    double a_norm_bound;
    std::vector<std::uint64_t> component_sizes;
  };
  std::vector<std::vector<ClusterRow>> slots(tasks);
  parallel_for(tasks, cfg.num_threads, [&](std::size_t task) {
    const int n = cfg.n_list[task / reals];
    const std::size_t r = task % reals;
    const std::uint64_t seed = realization_seed(cfg.base_seed, r);
    const auto field = detail::sample_field(cfg, n, seed);
    auto& rows = slots[task];
    rows.reserve(e);
    for (double eps : cfg.eps_grid) {
      const auto geo = analyze_geometry(field, eps);
      ClusterRow row;
      row.n = n;
      row.seed = seed;
      row.eps = eps;
      row.ld_size = geo.set.members.size();
      row.num_components = geo.clusters.components.size();
      row.max_component = geo.clusters.max_size;
      row.k_eps = geo.clusters.k_eps;
      row.omega = geo.clusters.max_size <
                  static_cast<std::size_t>(geo.clusters.k_eps);
      row.a_norm_exact = geo.norm_exact;
      row.a_norm_bound = geo.norm_bound;
      for (const auto& c : geo.clusters.components) {
        row.component_sizes.push_back(c.size());
      }
      rows.push_back(std::move(row));
    }
  });

  RunOutput out;
  out.header_comment = detail::header_comment(cfg);
  const std::string p_text = qrem::to_string(cfg.order);
  for (const auto& slot : slots) {
    for (const auto& row : slot) {
      nlohmann::ordered_json j;
      j["N"] = row.n;
      j["p"] = p_text;
      j["seed"] = row.seed;
      j["eps"] = row.eps;
      j["ld_size"] = row.ld_size;
      j["num_components"] = row.num_components;
      j["max_component"] = row.max_component;
      j["k_eps"] = row.k_eps;
      j["omega"] = static_cast<int>(row.omega);
      j["a_norm_exact"] = row.a_norm_exact;
      j["a_norm_bound"] = row.a_norm_bound;
      out.rows.push_back(std::move(j));
    }
  }

  for (std::size_t ni = 0; ni < num_n; ++ni) {
    for (std::size_t ei = 0; ei < e; ++ei) {
      ClusterPointStat stat;
      stat.n = cfg.n_list[ni];
      stat.eps = cfg.eps_grid[ei];
      stat.realizations = static_cast<int>(reals);
      int omega_count = 0;
      int norm_ok = 0;
      for (std::size_t r = 0; r < reals; ++r) {
        const auto& row = slots[ni * reals + r][ei];
        stat.k_eps = row.k_eps;
        omega_count += row.omega ? 1 : 0;
        norm_ok += row.a_norm_exact <= row.a_norm_bound + 1e-9 ? 1 : 0;
        ++stat.max_size_histogram[row.max_component];
        for (const std::uint64_t size : row.component_sizes) {
          ++stat.component_size_histogram[size];
        }
      }
      stat.omega_frequency = omega_count / static_cast<double>(reals);
      stat.norm_ok_fraction = norm_ok / static_cast<double>(reals);
      out.summary.cluster_stats.push_back(std::move(stat));
    }
  }
  return out;
}

/// Per-realization pressure sandwich: exact dense p_N against both Gibbs
/// lower bounds and the Golden-Thompson upper bound, with slack summary.
inline RunOutput run_bound_sandwich(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.beta_grid.empty() || cfg.gamma_grid.empty() || cfg.eps_grid.empty()) {
    throw config_error("bounds: beta, gamma, and eps grids must be nonempty");
  }
  for (int n : cfg.n_list) {
    if (n > cfg.dense_cutoff) {
      throw capacity_error("bounds: N=" + std::to_string(n) +
                           " exceeds dense cutoff " +
                           std::to_string(cfg.dense_cutoff));
    }
  }
  const std::size_t num_n = cfg.n_list.size();
  const auto reals = static_cast<std::size_t>(cfg.num_realizations);
  const std::size_t tasks = num_n * reals;

  struct TaskRow {
    int n;
    std::uint64_t seed;
    BoundReport report;
  };
  std::vector<std::vector<TaskRow>> slots(tasks);
  parallel_for(tasks, cfg.num_threads, [&](std::size_t task) {
    const int n = cfg.n_list[task / reals];
    const std::size_t r = task % reals;
    const std::uint64_t seed = realization_seed(cfg.base_seed, r);
    const auto field = detail::sample_field(cfg, n, seed);
    std::vector<EpsilonGeometry> geos;
    geos.reserve(cfg.eps_grid.size());
    for (double eps : cfg.eps_grid) geos.push_back(analyze_geometry(field, eps));
    auto& rows = slots[task];
    for (double gamma : cfg.gamma_grid) {
      const QremOperator op(gamma, field);
      const auto spectrum = dense_spectrum(op);
      for (double beta : cfg.beta_grid) {
        const double exact = pressure_from_levels(spectrum, beta, n);
        for (const auto& geo : geos) {
          rows.push_back(TaskRow{n, seed,
                                 make_bound_report(op, beta, geo, exact)});
        }
      }
    }
  });

  RunOutput out;
  out.header_comment = detail::header_comment(cfg);
  const std::string p_text = qrem::to_string(cfg.order);
  double min_classical = std::numeric_limits<double>::infinity();
  double min_para = std::numeric_limits<double>::infinity();
  double min_gt = std::numeric_limits<double>::infinity();
  for (const auto& slot : slots) {
    for (const auto& row : slot) {
      const auto& rep = row.report;
      nlohmann::ordered_json j;
      j["N"] = row.n;
      j["p"] = p_text;
      j["seed"] = row.seed;
      j["beta"] = rep.beta;
      j["gamma"] = rep.gamma;
      j["eps"] = rep.eps;
      j["exact"] = rep.exact_pressure;
      j["classical_lower"] = rep.classical_lower;
      j["para_lower"] = rep.para_lower;
      j["gt_upper"] = rep.gt_upper;
      j["a_norm_exact"] = rep.a_norm_exact;
      j["a_norm_bound"] = rep.a_norm_bound;
      j["slack_classical"] = rep.slack_classical;
      j["slack_para"] = rep.slack_para;
      j["slack_gt"] = rep.slack_gt;
      out.rows.push_back(std::move(j));
      min_classical = std::min(min_classical, rep.slack_classical);
      min_para = std::min(min_para, rep.slack_para);
      min_gt = std::min(min_gt, rep.slack_gt);
    }
  }
  out.summary.min_slack_classical = min_classical;
  out.summary.min_slack_para = min_para;
  out.summary.min_slack_gt = min_gt;
  return out;
}

/// The phase boundary data: the first-order line (closed form and the
/// bisection cross-check) over the beta grid, plus the freezing line at
/// beta_c up to Gamma_c(beta_c).
inline RunOutput trace_phase_boundary(const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) {
    throw config_error("boundary: beta grid must be nonempty");
  }
  for (double beta : beta_grid) {
    if (beta <= 0.0) throw config_error("boundary: beta grid must be positive");
  }
  RunOutput out;
  out.header_comment = std::string("qrem v") + kVersion + " boundary";
  double max_diff = 0.0;
  for (double beta : beta_grid) {
    const double closed = gamma_c(beta);
    const double bisect = gamma_c_bisection(beta);
    const double diff = std::abs(closed - bisect);
    max_diff = std::max(max_diff, diff);
    nlohmann::ordered_json j;
    j["curve"] = "first_order";
    j["beta"] = beta;
    j["gamma"] = closed;
    j["gamma_bisect"] = bisect;
    j["diff"] = diff;
    out.rows.push_back(std::move(j));
  }
  const double gamma_top = gamma_c(beta_c());
  for (int i = 0; i <= 20; ++i) {
    nlohmann::ordered_json j;
    j["curve"] = "freezing";
    j["beta"] = beta_c();
    j["gamma"] = gamma_top * i / 20.0;
    j["gamma_bisect"] = nullptr;
    j["diff"] = nullptr;
    out.rows.push_back(std::move(j));
  }
  out.summary.max_boundary_diff = max_diff;
  return out;
}

}  // namespace qrem::sweep
