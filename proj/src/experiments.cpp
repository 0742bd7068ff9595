#include "tsmm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tsmm/rng.hpp"

namespace tsmm {

namespace {

namespace fs = std::filesystem;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

Vector draw_vector(std::uint64_t key, std::size_t n, double lo, double hi) {
  CounterRng rng(key);
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::string box_label(double lb, double ub) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g..%g", lb, ub);
  return buf;
}

}  // namespace

ExperimentResult run_exp1(const ExperimentSpec& spec, const SolverConfig& cfg,
                          const Dimensions& dims) {
  ExperimentResult result;
  fs::create_directories(spec.output_dir);
  const auto [lb, ub] = spec.boxes.empty() ? std::pair<double, double>{-10.0, 10.0}
                                           : spec.boxes.front();
  const std::size_t n = spec.n_values.empty() ? 50 : spec.n_values.front();

  for (std::size_t ti = 0; ti < spec.tau_values.size(); ++ti) {
    const double tau = spec.tau_values[ti];
    for (std::size_t i = 0; i < spec.num_instances; ++i) {
      const std::uint64_t inst_seed = CounterRng::derive_key(spec.master_seed, {10, ti, i});
      const std::uint64_t scn_seed = CounterRng::derive_key(spec.master_seed, {11, ti, i});

      SaaProblem prob;
      std::string gen_error;
      try {
        prob = make_saa_problem(generate_instance(dims, tau, lb, ub, inst_seed), n, scn_seed);
      } catch (const std::exception& e) {
        gen_error = e.what();
      }

      for (std::size_t p = 0; p < spec.num_initial_points; ++p) {
        char name[96];
        std::snprintf(name, sizeof(name), "exp1_t%zu_i%zu_p%zu.csv", ti, i, p);
        RunRecord rec;
        rec.file = name;
        rec.tau = tau;
        rec.instance = i;
        rec.init = p;
        rec.n = n;
        rec.box = box_label(lb, ub);
        if (!gen_error.empty()) {
          rec.status = "Error";
          rec.error = gen_error;
          ++result.failures;
          result.runs.push_back(rec);
          continue;
        }
        const std::uint64_t init_seed = CounterRng::derive_key(spec.master_seed, {12, ti, i, p});
        const Vector x0 = draw_vector(CounterRng::derive_key(init_seed, {0}), dims.n1, 7.0, 10.0);
        const Vector y0 = draw_vector(CounterRng::derive_key(init_seed, {1}), dims.m1, 0.0, 1.0);
        try {
          const IppgdaTrace trace = run_ippgda(prob, x0, y0, cfg);
          write_file((fs::path(spec.output_dir) / name).string(), trace.to_csv());
          rec.status = trace.status == RunStatus::Converged ? "Converged" : "MaxIters";
          rec.iterations = trace.records.size();
          rec.final_resval = trace.records.back().resval;
          if (trace.status != RunStatus::Converged) ++result.failures;
        } catch (const std::exception& e) {
          rec.status = "Error";
          rec.error = e.what();
          ++result.failures;
        }
        result.runs.push_back(rec);
      }
    }
  }
  write_manifest(result, (fs::path(spec.output_dir) / "exp1_manifest.json").string());
  return result;
}

ExperimentResult run_exp2(const ExperimentSpec& spec, const SolverConfig& cfg,
                          const Dimensions& dims, double tau) {
  ExperimentResult result;
  fs::create_directories(spec.output_dir);
  const std::size_t n_max =
      *std::max_element(spec.n_values.begin(), spec.n_values.end());

  std::string runs_csv = "box,N,instance,objective_at_final,psi_inner_max\n";
  // (box index, N) -> values per instance
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<double, double>>> cells;

  for (std::size_t bi = 0; bi < spec.boxes.size(); ++bi) {
    const auto [lb, ub] = spec.boxes[bi];
    for (std::size_t i = 0; i < spec.num_instances; ++i) {
      // seeds are box-independent: common random numbers across boxes
      const std::uint64_t inst_seed = CounterRng::derive_key(spec.master_seed, {20, i});
      const std::uint64_t scn_seed = CounterRng::derive_key(spec.master_seed, {21, i});
      const std::uint64_t init_seed = CounterRng::derive_key(spec.master_seed, {22, i});

      SaaProblem full;
      std::string gen_error;
      try {
        full = make_saa_problem(generate_instance(dims, tau, lb, ub, inst_seed), n_max, scn_seed);
      } catch (const std::exception& e) {
        gen_error = e.what();
      }
      const Vector x0 = draw_vector(CounterRng::derive_key(init_seed, {0}), dims.n1, 7.0, 10.0);
      const Vector y0 = draw_vector(CounterRng::derive_key(init_seed, {1}), dims.m1, 0.0, 1.0);

      for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
        const std::size_t n = spec.n_values[ni];
        RunRecord rec;
        rec.tau = tau;
        rec.instance = i;
        rec.n = n;
        rec.box = box_label(lb, ub);
        if (!gen_error.empty()) {
          rec.status = "Error";
          rec.error = gen_error;
          ++result.failures;
          result.runs.push_back(rec);
          continue;
        }
        // nested sampling: prefix of the max-N scenario set
        SaaProblem prob;
        prob.instance = full.instance;
        prob.seed = full.seed;
        prob.scenarios.assign(full.scenarios.begin(), full.scenarios.begin() + n);
        prob.instance.sigma_lb = strong_modulus(prob.scenarios);
        try {
          const IppgdaTrace trace = run_ippgda(prob, x0, y0, cfg);
          const double obj = trace.records.back().objective;
          const double psi = inner_max(trace.final_x1, prob, 1e-6).value;
          char row[160];
          std::snprintf(row, sizeof(row), "%s,%zu,%zu,%.12g,%.12g\n", rec.box.c_str(), n, i, obj,
                        psi);
          runs_csv += row;
          cells[{bi, n}].push_back({obj, psi});
          rec.status = trace.status == RunStatus::Converged ? "Converged" : "MaxIters";
          rec.iterations = trace.records.size();
          rec.final_resval = trace.records.back().resval;
          if (trace.status != RunStatus::Converged) ++result.failures;
        } catch (const std::exception& e) {
          rec.status = "Error";
          rec.error = e.what();
          ++result.failures;
        }
        result.runs.push_back(rec);
      }
    }
  }

  std::string summary_csv =
      "box,N,mean_objective,std_objective,mean_psi_inner_max,std_psi_inner_max\n";
  for (std::size_t bi = 0; bi < spec.boxes.size(); ++bi) {
    for (std::size_t n : spec.n_values) {
      auto it = cells.find({bi, n});
      if (it == cells.end() || it->second.empty()) continue;
      const auto& vals = it->second;
      const double count = static_cast<double>(vals.size());
      double mo = 0.0, mp = 0.0;
      for (const auto& [o, p] : vals) {
        mo += o;
        mp += p;
      }
      mo /= count;
      mp /= count;
      double so = 0.0, sp = 0.0;
      for (const auto& [o, p] : vals) {
        so += (o - mo) * (o - mo);
        sp += (p - mp) * (p - mp);
      }
      so = vals.size() > 1 ? std::sqrt(so / (count - 1.0)) : 0.0;
      sp = vals.size() > 1 ? std::sqrt(sp / (count - 1.0)) : 0.0;
      char row[200];
      std::snprintf(row, sizeof(row), "%s,%zu,%.12g,%.12g,%.12g,%.12g\n",
                    box_label(spec.boxes[bi].first, spec.boxes[bi].second).c_str(), n, mo, so, mp,
                    sp);
      summary_csv += row;
    }
  }

  write_file((fs::path(spec.output_dir) / "exp2_runs.csv").string(), runs_csv);
  write_file((fs::path(spec.output_dir) / "exp2_summary.csv").string(), summary_csv);
  write_manifest(result, (fs::path(spec.output_dir) / "exp2_manifest.json").string());
  return result;
}

void write_manifest(const ExperimentResult& result, const std::string& path) {
  nlohmann::json j;
  j["failures"] = result.failures;
  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& r : result.runs) {
    nlohmann::json e{{"file", r.file},         {"tau", r.tau},
                     {"instance", r.instance}, {"init", r.init},
                     {"n", r.n},               {"box", r.box},
                     {"status", r.status},     {"iterations", r.iterations},
                     {"final_resval", r.final_resval}};
    if (!r.error.empty()) e["error"] = r.error;
    runs.push_back(e);
  }
  j["runs"] = runs;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace tsmm
