#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vscsim/config.hpp"
#include "vscsim/errors.hpp"
#include "vscsim/harness.hpp"
#include "vscsim/metrics.hpp"
#include "vscsim/text_io.hpp"

namespace fs = std::filesystem;
using namespace vscsim;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> cells;
  std::optional<std::string> algo;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--cells", o.cells, "number of small cells");
  cmd->add_option("--algo", o.algo, "FQL, QL, U-FQL, U-QL, G-PHY-RF, Static-MacPhy or AllOff");
  cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig resolve(const Overrides& o, Protocol protocol) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  c.protocol = protocol;
  if (o.seed) c.seed = *o.seed;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.cells) c.sim.n_cells = *o.cells;
  if (o.algo) c.agent.algorithm = algorithm_from_name(*o.algo);
  if (o.out) c.paths.output = *o.out;
  c.validate();
  return c;
}

fs::path policies_dir(const ExperimentConfig& c) {
  return c.paths.policies.empty() ? fs::path(c.paths.output) / "policies"
                                  : fs::path(c.paths.policies);
}

std::string stem_of(const ExperimentConfig& c, const char* protocol) {
  return std::string(protocol) + "_" + std::string(algorithm_name(c.agent.algorithm));
}

void print_summary(const MetricsSummary& s) {
  std::cout << s.algorithm << ": grid " << s.grid_energy_kwh_per_year << " kWh/yr, drop "
            << s.mean_drop_rate_pct << " %, reward " << s.cumulative_reward;
  if (s.normalized_cumulative_reward) std::cout << " (" << *s.normalized_cumulative_reward << " of bound)";
  std::cout << '\n';
}

int cmd_gen_traces(const Overrides& o) {
  auto c = resolve(o, Protocol::Train);
  const fs::path out(c.paths.output);
  fs::create_directories(out);
  export_traces_csv(out / "traces.csv", training_traces(c));
  export_traces_csv(out / "validation_traces.csv", validation_traces(c));
  std::cout << "wrote " << (out / "traces.csv").string() << " and "
            << (out / "validation_traces.csv").string() << '\n';
  return 0;
}

int cmd_train(const Overrides& o) {
  auto c = resolve(o, Protocol::Train);
  c.paths.policies = policies_dir(c).string();
  const fs::path out(c.paths.output);
  fs::create_directories(out);
  const auto traces = training_traces(c);
  auto result = sweep(c, traces);
  auto summary = summarize(result.best_evaluation, std::string(algorithm_name(c.agent.algorithm)));
  if (is_learning(c.agent.algorithm)) {
    summary.selected_alpha = result.best.alpha;
    summary.selected_epsilon = result.best.epsilon0;
  }
  export_run(out, stem_of(c, "train"), result.best_evaluation, summary);
  write_text_file_atomic(out / (stem_of(c, "train") + "_reward_series.csv"),
                         series_csv("cumulative_reward", result.best.reward_series));
  std::string grid = "alpha,epsilon0,evaluation_reward\n";
  for (const auto& e : result.entries) {
    grid += format_double(e.alpha) + "," + format_double(e.epsilon0) + "," +
            format_double(e.evaluation_reward) + "\n";
  }
  write_text_file_atomic(out / (stem_of(c, "train") + "_sweep.csv"), grid);
  print_summary(summary);
  return 0;
}

int cmd_evaluate(const Overrides& o) {
  auto c = resolve(o, Protocol::Evaluate);
  auto agents = load_agents(policies_dir(c), c, "load.agent", 0.0);
  auto log = evaluate(c, agents, training_traces(c));
  auto summary = summarize(log, std::string(algorithm_name(c.agent.algorithm)));
  export_run(c.paths.output, stem_of(c, "evaluate"), log, summary);
  print_summary(summary);
  return 0;
}

int cmd_validate(const Overrides& o) {
  auto c = resolve(o, Protocol::Validate);
  auto agents = load_agents(policies_dir(c), c, "load.agent", c.agent.validation_epsilon);
  auto log = validate(c, agents, validation_traces(c));
  auto summary = summarize(log, std::string(algorithm_name(c.agent.algorithm)));
  export_run(c.paths.output, stem_of(c, "validate"), log, summary);
  print_summary(summary);
  return 0;
}

int cmd_runtime(const Overrides& o) {
  auto c = resolve(o, Protocol::Runtime);
  auto log = runtime(c, validation_traces(c));
  auto summary = summarize(log, std::string(algorithm_name(c.agent.algorithm)));
  export_run(c.paths.output, stem_of(c, "runtime"), log, summary);
  write_text_file_atomic(fs::path(c.paths.output) / (stem_of(c, "runtime") + "_daily_reward.csv"),
                         series_csv("daily_reward", daily_reward_series(log)));
  print_summary(summary);
  return 0;
}

int cmd_bound(const Overrides& o) {
  auto c = resolve(o, Protocol::Bound);
  const fs::path out(c.paths.output);
  fs::create_directories(out);
  const auto traces = training_traces(c);
  auto res = bound(c, traces);
  nlohmann::json j;
  j["total_cost"] = res.solution.total_cost;
  j["cumulative_reward_bound"] = res.solution.cumulative_reward_bound;
  j["battery_levels"] = c.dp.battery_levels;
  j["horizon"] = traces.horizon();
  j["n_cells"] = c.sim.n_cells;
  j["expansions"] = res.solution.expansions;
  write_text_file_atomic(out / "bound.json", j.dump(2) + "\n");
  std::cout << "bound: total cost " << res.solution.total_cost << ", cumulative reward "
            << res.solution.cumulative_reward_bound << '\n';
  if (res.replay) {
    auto summary = summarize(*res.replay, "Off-line", res.solution.cumulative_reward_bound);
    export_run(out, "bound_Off-line", *res.replay, summary);
    print_summary(summary);
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out_dir) {
  std::vector<MetricsSummary> rows;
  std::optional<double> bound_reward;
  for (const auto& f : files) {
    rows.push_back(load_summary(f));
    if (rows.back().algorithm == "Off-line" && rows.back().bound_reward) {
      bound_reward = rows.back().bound_reward;
    }
  }
  if (bound_reward) {
    for (auto& r : rows) {
      r.bound_reward = bound_reward;
      r.normalized_cumulative_reward = r.cumulative_reward / *bound_reward;
    }
  }
  const auto table = comparison_table_csv(rows);
  fs::create_directories(out_dir);
  write_text_file_atomic(fs::path(out_dir) / "comparison.csv", table);
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting small-cell simulator and learning harness"};
  app.require_subcommand(1);

  Overrides gen, tr, ev, va, rt, bd;
  add_common(app.add_subcommand("gen-traces", "write training and validation traces"), gen);
  add_common(app.add_subcommand("train", "train agents (sweeps alpha/epsilon grids if set)"), tr);
  add_common(app.add_subcommand("evaluate", "greedy run of saved policies on training traces"), ev);
  add_common(app.add_subcommand("validate", "saved policies on fresh traces, 5% exploration"), va);
  add_common(app.add_subcommand("runtime", "zero-initialised agents learning on the job"), rt);
  add_common(app.add_subcommand("bound", "off-line optimum over the training traces"), bd);

  std::vector<std::string> report_files;
  std::string report_out = "out";
  auto* rep = app.add_subcommand("report", "comparison table from summary JSON files");
  rep->add_option("summaries", report_files, "summary files")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", report_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("gen-traces")) return cmd_gen_traces(gen);
    if (app.got_subcommand("train")) return cmd_train(tr);
    if (app.got_subcommand("evaluate")) return cmd_evaluate(ev);
    if (app.got_subcommand("validate")) return cmd_validate(va);
    if (app.got_subcommand("runtime")) return cmd_runtime(rt);
    if (app.got_subcommand("bound")) return cmd_bound(bd);
    if (app.got_subcommand("report")) return cmd_report(report_files, report_out);
  } catch (const Error& e) {
    nlohmann::json j{{"error", std::string(category_name(e.category()))}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "internal"}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return 1;
  }
  return 0;
}
