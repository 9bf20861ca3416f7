// Command-line front end: ensemble sweeps, bound checks, cluster studies,
// and single pressure evaluations over the QREM phase diagram.
//
// Exit codes: 0 success, 2 configuration error, 3 capacity error,
// 4 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrem/qrem.hpp"

namespace {

using qrem::sweep::RunOutput;
using qrem::sweep::SweepConfig;

struct CliValues {
  std::vector<int> n;
  std::string p;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> eps;
  int realizations = 0;
  std::uint64_t seed = 0;
  int dense_cutoff = 0;
  std::string method;
  int probes = 0;
  int steps = 0;
  std::uint64_t slq_seed = 0;
  int threads = 0;
  std::string out;
  std::string format;
  std::string config_path;
};

struct CliFlags {
  CLI::Option* n = nullptr;
  CLI::Option* p = nullptr;
  CLI::Option* beta = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* realizations = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* dense_cutoff = nullptr;
  CLI::Option* method = nullptr;
  CLI::Option* probes = nullptr;
  CLI::Option* steps = nullptr;
  CLI::Option* slq_seed = nullptr;
  CLI::Option* threads = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* config = nullptr;
};

CliFlags add_common_options(CLI::App* cmd, CliValues* v) {
  CliFlags f;
  f.n = cmd->add_option("--n", v->n, "Spin counts (repeatable)");
  f.p = cmd->add_option("--p", v->p, "Interaction order: integer >= 1 or 'inf'");
  f.beta = cmd->add_option("--beta", v->beta, "Inverse temperatures (repeatable)");
  f.gamma = cmd->add_option("--gamma", v->gamma, "Field strengths (repeatable)");
  f.eps = cmd->add_option("--eps", v->eps, "Deviation levels (repeatable)");
  f.realizations = cmd->add_option("--realizations", v->realizations,
                                   "Disorder realizations per grid point");
  f.seed = cmd->add_option("--seed", v->seed, "Base seed");
  f.dense_cutoff = cmd->add_option("--dense-cutoff", v->dense_cutoff,
                                   "Largest N solved densely (<= 14)");
  f.method = cmd->add_option("--method", v->method,
                             "Pressure method: dense, classical, slq, auto");
  f.probes = cmd->add_option("--probes", v->probes, "SLQ probe vectors");
  f.steps = cmd->add_option("--steps", v->steps, "SLQ Lanczos steps");
  f.slq_seed = cmd->add_option("--slq-seed", v->slq_seed, "SLQ probe seed");
  f.threads = cmd->add_option("--threads", v->threads, "Worker threads");
  f.out = cmd->add_option("--out", v->out, "Output file path");
  f.format = cmd->add_option("--format", v->format, "Row format: csv or json");
  f.config = cmd->add_option("--config", v->config_path,
                             "JSON config file mirroring the sweep settings");
  return f;
}

SweepConfig build_config(const CliValues& v, const CliFlags& f) {
  SweepConfig cfg;
  if (f.config->count() > 0) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(qrem::read_text_file(v.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw qrem::config_error(std::string("cannot parse config file: ") +
                               e.what());
    }
    cfg = qrem::sweep::config_from_json(doc);
  }
  if (f.n->count() > 0) cfg.n_list = v.n;
  if (f.p->count() > 0) cfg.order = qrem::parse_order(v.p);
  if (f.beta->count() > 0) cfg.beta_grid = v.beta;
  if (f.gamma->count() > 0) cfg.gamma_grid = v.gamma;
  if (f.eps->count() > 0) cfg.eps_grid = v.eps;
  if (f.realizations->count() > 0) cfg.num_realizations = v.realizations;
  if (f.seed->count() > 0) cfg.base_seed = v.seed;
  if (f.dense_cutoff->count() > 0) cfg.dense_cutoff = v.dense_cutoff;
  if (f.method->count() > 0) cfg.method = qrem::sweep::parse_method(v.method);
  if (f.probes->count() > 0) cfg.slq.num_probes = v.probes;
  if (f.steps->count() > 0) cfg.slq.lanczos_steps = v.steps;
  if (f.slq_seed->count() > 0) cfg.slq.seed = v.slq_seed;
  if (f.threads->count() > 0) cfg.num_threads = v.threads;
  if (f.out->count() > 0) cfg.out_path = v.out;
  if (f.format->count() > 0) cfg.format = qrem::sweep::parse_format(v.format);
  return cfg;
}

void emit(const SweepConfig& cfg, const RunOutput& out) {
  qrem::sweep::write_outputs(cfg, out);
  std::cout << out.summary_doc().dump(1) << "\n";
  if (!cfg.out_path.empty()) {
    std::cerr << "rows written to " << cfg.out_path << "\n";
  }
}

int run_pressure_point(const SweepConfig& cfg) {
  if (cfg.n_list.empty() || cfg.beta_grid.empty() || cfg.gamma_grid.empty()) {
    throw qrem::config_error("pressure: --n, --beta, and --gamma are required");
  }
  const int n = cfg.n_list.front();
  const double beta = cfg.beta_grid.front();
  const double gamma = cfg.gamma_grid.front();
  const std::uint64_t seed = qrem::sweep::realization_seed(cfg.base_seed, 0);
  const auto field = cfg.order.is_finite()
                         ? qrem::sample_pspin_field(n, cfg.order.value(), seed)
                         : qrem::sample_rem_field(n, seed);
  const qrem::QremOperator op(gamma, field);
  qrem::PressureRecord record{n, field.order(), seed, beta, gamma,
                              qrem::PressureMethod::kExactDense, 0.0, 0.0};
  switch (cfg.method) {
    case qrem::sweep::MethodPolicy::kClassical:
      if (gamma != 0.0) {
        throw qrem::config_error("pressure: classical method requires gamma 0");
      }
      record = qrem::pressure_exact_classical(field, beta);
      break;
    case qrem::sweep::MethodPolicy::kDense:
      record = qrem::pressure_exact_dense(op, beta);
      break;
    case qrem::sweep::MethodPolicy::kSlq:
      record = qrem::pressure_slq(op, beta, cfg.slq);
      break;
    case qrem::sweep::MethodPolicy::kAuto:
      record = n <= cfg.dense_cutoff ? qrem::pressure_exact_dense(op, beta)
                                     : qrem::pressure_slq(op, beta, cfg.slq);
      break;
  }
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  rows.push_back(qrem::record_to_json(record));
  const std::string header =
      std::string("qrem v") + qrem::kVersion + " pressure";
  const std::string text = cfg.format == qrem::sweep::OutputFormat::kCsv
                               ? qrem::rows_to_csv(rows, header)
                               : qrem::rows_to_json_doc(rows, header);
  std::cout << text;
  if (!cfg.out_path.empty()) qrem::write_text_file(cfg.out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QREM pressure, phase-diagram, and bound verification toolkit"};
  app.set_version_flag("--version", std::string("qrem v") + qrem::kVersion);
  app.require_subcommand(1);

  CliValues values;
  auto* cmd_phase = app.add_subcommand(
      "phase-diagram", "Finite-N pressures over an (N, beta, gamma) grid");
  auto* cmd_self = app.add_subcommand(
      "self-averaging", "Ensemble fluctuation statistics of the pressure");
  auto* cmd_clusters = app.add_subcommand(
      "clusters", "Large-deviation cluster decomposition statistics");
  auto* cmd_bounds = app.add_subcommand(
      "bounds", "Per-realization pressure sandwich (lower/upper bounds)");
  auto* cmd_boundary = app.add_subcommand(
      "boundary", "First-order and freezing phase boundary lines");
  auto* cmd_pressure = app.add_subcommand(
      "pressure", "Single pressure evaluation at one (N, beta, gamma)");

  std::vector<std::pair<CLI::App*, CliFlags>> bound;
  for (CLI::App* cmd : {cmd_phase, cmd_self, cmd_clusters, cmd_bounds,
                        cmd_boundary, cmd_pressure}) {
    bound.emplace_back(cmd, add_common_options(cmd, &values));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    const CliFlags* flags = nullptr;
    for (const auto& [cmd, f] : bound) {
      if (cmd == active) flags = &f;
    }
    const SweepConfig cfg = build_config(values, *flags);
    if (active == cmd_phase) {
      emit(cfg, qrem::sweep::run_phase_diagram(cfg));
    } else if (active == cmd_self) {
      emit(cfg, qrem::sweep::run_self_averaging(cfg));
    } else if (active == cmd_clusters) {
      emit(cfg, qrem::sweep::run_cluster_study(cfg));
    } else if (active == cmd_bounds) {
      emit(cfg, qrem::sweep::run_bound_sandwich(cfg));
    } else if (active == cmd_boundary) {
      if (cfg.beta_grid.empty()) {
        throw qrem::config_error("boundary: --beta grid is required");
      }
      emit(cfg, qrem::sweep::trace_phase_boundary(cfg.beta_grid));
    } else if (active == cmd_pressure) {
      return run_pressure_point(cfg);
    }
    return 0;
  } catch (const qrem::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qrem::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qrem::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const qrem::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
