#include "tsmm/toml_config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "tsmm/errors.hpp"

namespace tsmm {

namespace {

struct TomlValue {
  enum class Kind { Number, Bool, String, Array } kind = Kind::Number;
  double num = 0.0;
  bool boolean = false;
  std::string str;
  std::vector<double> array;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

TomlValue parse_value(const std::string& raw) {
  TomlValue v;
  const std::string t = trim(raw);
  if (t.empty()) throw InvalidConfig("config: empty value");
  if (t == "true" || t == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.boolean = (t == "true");
    return v;
  }
  if (t.front() == '"' && t.back() == '"' && t.size() >= 2) {
    v.kind = TomlValue::Kind::String;
    v.str = t.substr(1, t.size() - 2);
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']') throw InvalidConfig("config: unterminated array");
    v.kind = TomlValue::Kind::Array;
    std::string body = t.substr(1, t.size() - 2);
    std::istringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string it = trim(item);
      if (it.empty()) continue;
      v.array.push_back(std::stod(it));
    }
    return v;
  }
  v.kind = TomlValue::Kind::Number;
  std::size_t pos = 0;
  v.num = std::stod(t, &pos);
  if (pos != t.size()) throw InvalidConfig("config: bad number: " + t);
  return v;
}

struct ParsedToml {
  // section -> key -> value
  std::vector<std::pair<std::string, std::pair<std::string, TomlValue>>> entries;
};

ParsedToml parse_toml(const std::string& text) {
  ParsedToml out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidConfig("config: malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw InvalidConfig("config: expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    out.entries.push_back({section, {key, parse_value(line.substr(eq + 1))}});
  }
  return out;
}

double as_num(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::Number) throw InvalidConfig("config: " + key + ": expected number");
  return v.num;
}

}  // namespace

AppConfig parse_config_text(const std::string& text) {
  AppConfig cfg;
  const ParsedToml toml = parse_toml(text);
  for (const auto& [section, kv] : toml.entries) {
    const std::string& key = kv.first;
    const TomlValue& v = kv.second;
    if (section == "dims") {
      const auto n = static_cast<std::size_t>(as_num(v, key));
      if (key == "n1") cfg.dims.n1 = n;
      else if (key == "m1") cfg.dims.m1 = n;
      else if (key == "n2") cfg.dims.n2 = n;
      else if (key == "m2") cfg.dims.m2 = n;
      else if (key == "l2") cfg.dims.l2 = n;
      else if (key == "s2") cfg.dims.s2 = n;
      else throw InvalidConfig("config: unknown key dims." + key);
    } else if (section == "instance") {
      if (key == "tau") cfg.tau = as_num(v, key);
      else if (key == "lb") cfg.lb = as_num(v, key);
      else if (key == "ub") cfg.ub = as_num(v, key);
      else if (key == "noise_scale") (void)as_num(v, key);  // fixed at 0.1 per the generator
      else throw InvalidConfig("config: unknown key instance." + key);
    } else if (section == "solver") {
      SolverConfig& s = cfg.solver;
      if (key == "beta_x") s.beta_x = as_num(v, key);
      else if (key == "beta_y") s.beta_y = as_num(v, key);
      else if (key == "delta0") s.delta0 = as_num(v, key);
      else if (key == "delta_decay") s.delta_decay = as_num(v, key);
      else if (key == "delta_floor") s.delta_floor = as_num(v, key);
      else if (key == "newton_tol_cap") s.newton_tol_cap = as_num(v, key);
      else if (key == "max_outer_iters") s.max_outer_iters = static_cast<std::size_t>(as_num(v, key));
      else if (key == "resval_tol") s.resval_tol = as_num(v, key);
      else if (key == "ls_ratio") s.ls_ratio = as_num(v, key);
      else if (key == "ls_backtrack") s.ls_backtrack = as_num(v, key);
      else if (key == "step_safeguard") s.step_safeguard = v.boolean;
      else if (key == "seed") s.seed = static_cast<std::uint64_t>(as_num(v, key));
      else if (key == "lambda_lb_mode") {
        if (v.str == "estimated") s.lambda_lb_mode = LambdaLbMode::Estimated;
        else if (v.str == "configured") s.lambda_lb_mode = LambdaLbMode::Configured;
        else throw InvalidConfig("config: lambda_lb_mode must be estimated or configured");
      } else if (key == "lambda_lb_value") {
        s.lambda_lb_value = as_num(v, key);
      } else {
        throw InvalidConfig("config: unknown key solver." + key);
      }
    } else if (section == "experiment") {
      ExperimentSpec& e = cfg.experiment;
      if (key == "kind") {
        if (v.str == "single") e.kind = ExperimentKind::Single;
        else if (v.str == "exp1") e.kind = ExperimentKind::Exp1;
        else if (v.str == "exp2") e.kind = ExperimentKind::Exp2;
        else throw InvalidConfig("config: experiment.kind must be single, exp1 or exp2");
      } else if (key == "tau_values") {
        e.tau_values = v.array;
      } else if (key == "n_values") {
        e.n_values.clear();
        for (double d : v.array) e.n_values.push_back(static_cast<std::size_t>(d));
      } else if (key == "box_lbs") {
        if (e.boxes.size() < v.array.size()) e.boxes.resize(v.array.size(), {-10.0, 10.0});
        for (std::size_t i = 0; i < v.array.size(); ++i) e.boxes[i].first = v.array[i];
      } else if (key == "box_ubs") {
        if (e.boxes.size() < v.array.size()) e.boxes.resize(v.array.size(), {-10.0, 10.0});
        for (std::size_t i = 0; i < v.array.size(); ++i) e.boxes[i].second = v.array[i];
      } else if (key == "num_instances") {
        e.num_instances = static_cast<std::size_t>(as_num(v, key));
      } else if (key == "num_initial_points") {
        e.num_initial_points = static_cast<std::size_t>(as_num(v, key));
      } else if (key == "master_seed") {
        e.master_seed = static_cast<std::uint64_t>(as_num(v, key));
      } else if (key == "output_dir") {
        e.output_dir = v.str;
      } else {
        throw InvalidConfig("config: unknown key experiment." + key);
      }
    } else {
      throw InvalidConfig("config: unknown section [" + section + "]");
    }
  }
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace tsmm
