#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsmm/experiments.hpp"
#include "tsmm/rng.hpp"
#include "tsmm/svg_plot.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out;  // empty: fall back to the config's output_dir
  std::uint64_t seed = 0;
  bool seed_set = false;
};

tsmm::AppConfig resolve_config(const CommonOpts& opts) {
  tsmm::AppConfig cfg;
  if (!opts.config_path.empty()) cfg = tsmm::load_config(opts.config_path);
  if (opts.seed_set) {
    cfg.solver.seed = opts.seed;
    cfg.experiment.master_seed = opts.seed;
  }
  if (!opts.out.empty()) cfg.experiment.output_dir = opts.out;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "TOML config file");
  cmd->add_option("--out", opts.out, "output directory or file");
  cmd->add_option("--seed", opts.seed, "master seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
}

int cmd_gen(const CommonOpts& opts) {
  const tsmm::AppConfig cfg = resolve_config(opts);
  const std::uint64_t seed = cfg.experiment.master_seed;
  const auto inst = tsmm::generate_instance(cfg.dims, cfg.tau, cfg.lb, cfg.ub,
                                            tsmm::CounterRng::derive_key(seed, {10, 0, 0}));
  const std::size_t n = cfg.experiment.n_values.empty() ? 50 : cfg.experiment.n_values.front();
  const auto prob =
      tsmm::make_saa_problem(inst, n, tsmm::CounterRng::derive_key(seed, {11, 0, 0}));
  const std::string path = opts.out.empty() ? "problem.json" : opts.out;
  const std::string parent = fs::path(path).parent_path().string();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  out << tsmm::saa_problem_to_json(prob) << "\n";
  std::cout << "wrote " << path << " (N=" << n << ", sigma_lb=" << prob.instance.sigma_lb
            << ")\n";
  return 0;
}

int cmd_solve(const CommonOpts& opts, const std::string& problem_path) {
  const tsmm::AppConfig cfg = resolve_config(opts);
  tsmm::SaaProblem prob;
  if (!problem_path.empty()) {
    std::ifstream in(problem_path);
    if (!in) throw tsmm::InvalidConfig("solve: cannot open " + problem_path);
    std::stringstream buf;
    buf << in.rdbuf();
    prob = tsmm::saa_problem_from_json(buf.str());
  } else {
    const std::uint64_t seed = cfg.experiment.master_seed;
    const auto inst = tsmm::generate_instance(cfg.dims, cfg.tau, cfg.lb, cfg.ub,
                                              tsmm::CounterRng::derive_key(seed, {10, 0, 0}));
    const std::size_t n = cfg.experiment.n_values.empty() ? 50 : cfg.experiment.n_values.front();
    prob = tsmm::make_saa_problem(inst, n, tsmm::CounterRng::derive_key(seed, {11, 0, 0}));
  }
  const std::uint64_t init_seed =
      tsmm::CounterRng::derive_key(cfg.experiment.master_seed, {12, 0, 0, 0});
  tsmm::CounterRng rx(tsmm::CounterRng::derive_key(init_seed, {0}));
  tsmm::CounterRng ry(tsmm::CounterRng::derive_key(init_seed, {1}));
  tsmm::Vector x0(prob.instance.dims.n1), y0(prob.instance.dims.m1);
  for (double& v : x0) v = rx.uniform(7.0, 10.0);
  for (double& v : y0) v = ry.uniform(0.0, 1.0);

  const tsmm::IppgdaTrace trace = tsmm::run_ippgda(prob, x0, y0, cfg.solver);
  const std::string out_dir = cfg.experiment.output_dir;
  fs::create_directories(out_dir);
  const std::string trace_path = (fs::path(out_dir) / "solve_trace.csv").string();
  std::ofstream out(trace_path, std::ios::binary);
  out << trace.to_csv();

  nlohmann::json meta{{"status", trace.status == tsmm::RunStatus::Converged ? "Converged" : "MaxIters"},
                      {"iterations", trace.records.size()},
                      {"final_resval", trace.records.back().resval},
                      {"final_objective", trace.records.back().objective},
                      {"final_x1", trace.final_x1},
                      {"final_y1", trace.final_y1},
                      {"master_seed", cfg.experiment.master_seed}};
  std::ofstream meta_out((fs::path(out_dir) / "solve_meta.json").string());
  meta_out << meta.dump(2) << "\n";
  std::cout << "status=" << meta["status"].get<std::string>()
            << " iterations=" << trace.records.size()
            << " resval=" << trace.records.back().resval << "\n";
  return trace.status == tsmm::RunStatus::Converged ? 0 : 1;
}

int cmd_exp1(const CommonOpts& opts) {
  tsmm::AppConfig cfg = resolve_config(opts);
  cfg.experiment.kind = tsmm::ExperimentKind::Exp1;
  const auto result = tsmm::run_exp1(cfg.experiment, cfg.solver, cfg.dims);
  std::cout << "exp1: " << result.runs.size() << " runs, " << result.failures << " failures\n";
  return result.failures == 0 ? 0 : 1;
}

int cmd_exp2(const CommonOpts& opts, bool full_scale) {
  tsmm::AppConfig cfg = resolve_config(opts);
  cfg.experiment.kind = tsmm::ExperimentKind::Exp2;
  if (full_scale) {
    cfg.experiment.n_values = {10, 50, 200, 500, 1000, 3000};
    cfg.experiment.num_instances = 30;
  }
  if (cfg.experiment.boxes.size() < 2) {
    cfg.experiment.boxes = {{-10.0, 10.0}, {-20.0, 20.0}};
  }
  const auto result = tsmm::run_exp2(cfg.experiment, cfg.solver, cfg.dims, cfg.tau);
  std::cout << "exp2: " << result.runs.size() << " runs, " << result.failures << " failures\n";
  return result.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage stochastic minimax solver and experiment runner"};
  app.require_subcommand(1);

  CommonOpts gen_opts, solve_opts, exp1_opts, exp2_opts;
  std::string solve_problem;
  std::string plot_in, plot_out;
  bool full_scale = false;

  CLI::App* gen = app.add_subcommand("gen", "generate a problem instance JSON");
  add_common(gen, gen_opts);

  CLI::App* solve = app.add_subcommand("solve", "run IPPGDA on one problem");
  add_common(solve, solve_opts);
  solve->add_option("--problem", solve_problem, "problem JSON from gen");

  CLI::App* exp1 = app.add_subcommand("exp1", "residual trace experiment");
  add_common(exp1, exp1_opts);

  CLI::App* exp2 = app.add_subcommand("exp2", "SAA convergence experiment");
  add_common(exp2, exp2_opts);
  exp2->add_flag("--full-scale", full_scale, "full N up to 3000 with 30 instances");

  CLI::App* plot = app.add_subcommand("plot", "render a CSV to SVG");
  plot->add_option("--in", plot_in, "input CSV")->required();
  plot->add_option("--out", plot_out, "output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_opts);
    if (solve->parsed()) return cmd_solve(solve_opts, solve_problem);
    if (exp1->parsed()) return cmd_exp1(exp1_opts);
    if (exp2->parsed()) return cmd_exp2(exp2_opts, full_scale);
    if (plot->parsed()) {
      tsmm::emit_plot(plot_in, plot_out);
      return 0;
    }
  } catch (const tsmm::InvalidConfig& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
