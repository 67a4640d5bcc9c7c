#include "qlyap/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qlyap {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::string body = trim(s);
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a number");
  }
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + v + "' is not an integer");
  }
  return x;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string number_text(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// "window(45, 55)" -> {"window", {"45", "55"}}
std::pair<std::string, std::vector<std::string>> call_syntax(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {trim(text), {}};
  const auto close = text.rfind(')');
  if (close == std::string::npos || close < open) {
    throw std::invalid_argument("state_selection: unbalanced parentheses in '" + text + "'");
  }
  return {trim(text.substr(0, open)), split_list(text.substr(open + 1, close - open - 1))};
}

}  // namespace

StateSelection StateSelection::parse(const std::string& text) {
  const auto [name, args] = call_syntax(text);
  StateSelection s;
  auto need = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("state_selection '" + text + "' expects " + std::to_string(n) + " argument(s)");
    }
  };
  if (name == "all") {
    need(0);
    s.kind = Kind::all;
  } else if (name == "ground") {
    need(0);
    s.kind = Kind::ground;
  } else if (name == "center") {
    need(0);
    s.kind = Kind::center;
  } else if (name == "window") {
    need(2);
    s.kind = Kind::window;
    s.lo_percent = to_double("state_selection", args[0]);
    s.hi_percent = to_double("state_selection", args[1]);
  } else if (name == "boltzmann") {
    need(1);
    s.kind = Kind::boltzmann;
    s.temperature = args[0] == "inf" ? INFINITY : to_double("state_selection", args[0]);
  } else {
    throw std::invalid_argument("unknown state_selection '" + text + "'");
  }
  return s;
}

std::string StateSelection::to_string() const {
  switch (kind) {
    case Kind::all:
      return "all";
    case Kind::ground:
      return "ground";
    case Kind::center:
      return "center";
    case Kind::window:
      return "window(" + number_text(lo_percent) + ", " + number_text(hi_percent) + ")";
    case Kind::boltzmann:
      return "boltzmann(" + (std::isinf(temperature) ? std::string("inf") : number_text(temperature)) + ")";
  }
  return "all";
}

std::vector<double> TimeGrid::points() const {
  if (!explicit_times.empty()) return explicit_times;
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    if (spacing == Spacing::geometric) {
      out.push_back(start * std::pow(stop / start, f));
    } else {
      out.push_back(start + (stop - start) * f);
    }
  }
  out.back() = stop;
  return out;
}

bool ExperimentConfig::has_task(const std::string& t) const {
  return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = unquote(trim(raw_value));
  if (key == "model") {
    if (v == "syk") {
      model = Model::syk;
    } else if (v == "xxz") {
      model = Model::xxz;
    } else {
      throw std::invalid_argument("config key 'model': expected syk or xxz, got '" + v + "'");
    }
  } else if (key == "size") {
    size = static_cast<int>(to_integer(key, v));
  } else if (key == "J") {
    j_scale = to_double(key, v);
  } else if (key == "K") {
    k_scale = to_double(key, v);
  } else if (key == "W") {
    w_scale = to_double(key, v);
  } else if (key == "t_start") {
    times.start = to_double(key, v);
  } else if (key == "t_stop") {
    times.stop = to_double(key, v);
  } else if (key == "t_count") {
    times.count = static_cast<int>(to_integer(key, v));
  } else if (key == "t_spacing") {
    if (v == "linear") {
      times.spacing = TimeGrid::Spacing::linear;
    } else if (v == "geometric") {
      times.spacing = TimeGrid::Spacing::geometric;
    } else {
      throw std::invalid_argument("config key 't_spacing': expected linear or geometric");
    }
  } else if (key == "times") {
    times.explicit_times = to_doubles(key, v);
  } else if (key == "n_samples") {
    n_samples = static_cast<int>(to_integer(key, v));
  } else if (key == "master_seed") {
    master_seed = static_cast<std::uint64_t>(to_integer(key, v));
  } else if (key == "state_selection") {
    selection = StateSelection::parse(v);
  } else if (key == "tasks") {
    tasks = split_list(v);
  } else if (key == "output_dir") {
    output_dir = v;
  } else if (key == "n_workers") {
    n_workers = static_cast<int>(to_integer(key, v));
  } else if (key == "subsystem_modes") {
    subsystem_modes = static_cast<int>(to_integer(key, v));
  } else if (key == "ks_window") {
    const auto w = to_doubles(key, v);
    if (w.size() != 2) throw std::invalid_argument("config key 'ks_window' expects two numbers");
    ks_window_lo = w[0];
    ks_window_hi = w[1];
  } else if (key == "unfolding") {
    unfolding = v;
  } else if (key == "gaps") {
    gaps = v;
  } else if (key == "unfold_degree") {
    unfold_degree = static_cast<int>(to_integer(key, v));
  } else if (key == "hist_time") {
    hist_time = to_double(key, v);
  } else if (key == "hist_bins") {
    const auto b = to_doubles(key, v);
    if (b.size() != 3) throw std::invalid_argument("config key 'hist_bins' expects lo, hi, count");
    hist_lo = b[0];
    hist_hi = b[1];
    hist_bins = static_cast<int>(b[2]);
  } else if (key == "save_couplings") {
    save_couplings = to_bool(key, v);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["model"] = model == Model::syk ? "syk" : "xxz";
  j["size"] = size;
  j["J"] = j_scale;
  j["K"] = k_scale;
  j["W"] = w_scale;
  if (times.explicit_times.empty()) {
    j["t_start"] = times.start;
    j["t_stop"] = times.stop;
    j["t_count"] = times.count;
    j["t_spacing"] = times.spacing == TimeGrid::Spacing::linear ? "linear" : "geometric";
  } else {
    j["times"] = times.explicit_times;
  }
  j["n_samples"] = n_samples;
  j["master_seed"] = master_seed;
  j["state_selection"] = selection.to_string();
  j["tasks"] = tasks;
  j["output_dir"] = output_dir;
  j["n_workers"] = n_workers;
  j["subsystem_modes"] = subsystem_modes;
  j["ks_window"] = {ks_window_lo, ks_window_hi};
  j["unfolding"] = unfolding;
  j["gaps"] = gaps;
  j["unfold_degree"] = unfold_degree;
  if (hist_time) j["hist_time"] = *hist_time;
  j["hist_bins"] = {hist_lo, hist_hi, static_cast<double>(hist_bins)};
  j["save_couplings"] = save_couplings;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ", ";
        text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
    } else {
      text = value.dump();
    }
    c.set(key, text);
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // '#' inside a quoted value is kept.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    c.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return c;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

ExperimentConfig load_config_or_manifest(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text);
    return config_from_json(j.contains("config") ? j.at("config") : j);
  }
  return parse_config(text);
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> v;
  const bool lyapunov_needed =
      c.has_task("growth") || c.has_task("spectrum") || c.has_task("rmt") || c.has_task("ks_ee");

  if (c.model == Model::syk) {
    if (c.size < 2 || c.size % 2 != 0) v.push_back("SYK needs an even N >= 2, got " + std::to_string(c.size));
    if (c.size > 28) v.push_back("SYK N above 28 exceeds the dense-matrix limit");
    if (c.j_scale < 0.0 || c.k_scale < 0.0) v.push_back("J and K must be non-negative");
  } else {
    if (c.size < 2 || c.size % 2 != 0) {
      v.push_back("XXZ needs an even N_site >= 2 (S_z = 0 sector), got " + std::to_string(c.size));
    }
    if (c.size > 14) v.push_back("XXZ N_site above 14 exceeds the dense-matrix limit");
    if (c.w_scale < 0.0) v.push_back("W must be non-negative");
  }

  const auto grid = c.times.points();
  if (grid.empty()) v.push_back("time grid is empty");
  if (c.times.explicit_times.empty()) {
    if (c.times.stop < c.times.start) v.push_back("t_stop must be >= t_start");
    if (c.times.spacing == TimeGrid::Spacing::geometric && !(c.times.start > 0.0)) {
      v.push_back("geometric time grid needs t_start > 0");
    }
  }
  if (lyapunov_needed) {
    for (double t : grid) {
      if (!(t > 0.0)) {
        v.push_back("Lyapunov exponents requested but the time grid contains t <= 0 (t = " + number_text(t) + ")");
        break;
      }
    }
  }

  if (c.n_samples < 1) v.push_back("n_samples must be >= 1");
  if (c.n_workers < 0) v.push_back("n_workers must be >= 0");

  const auto& sel = c.selection;
  if (sel.kind == StateSelection::Kind::window &&
      !(0.0 <= sel.lo_percent && sel.lo_percent < sel.hi_percent && sel.hi_percent <= 100.0)) {
    v.push_back("window percentages need 0 <= lo < hi <= 100");
  }
  if (sel.kind == StateSelection::Kind::boltzmann && !(sel.temperature > 0.0)) {
    v.push_back("boltzmann temperature must be positive");
  }

  if (c.tasks.empty()) v.push_back("no tasks requested");
  for (const auto& t : c.tasks) {
    if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end()) {
      v.push_back("unknown task '" + t + "'");
    }
  }
  if (c.has_task("ks_ee")) {
    if (c.model != Model::syk) v.push_back("ks_ee is defined for the SYK model only");
    const int modes = c.size / 2;
    const int a = c.subsystem_modes > 0 ? c.subsystem_modes : c.size / 4;
    if (a < 1 || a > modes - 1) v.push_back("subsystem_modes must lie in [1, N/2 - 1]");
    if (!(c.ks_window_hi > c.ks_window_lo)) v.push_back("ks_window needs lo < hi");
  }
  if (c.has_task("rmt")) {
    if (sel.kind == StateSelection::Kind::boltzmann) {
      v.push_back("rmt pools unweighted spectra; use all, ground, center or window selection");
    }
    if (c.unfolding != "standard" && c.unfolding != "fixed_i") {
      v.push_back("unfolding must be standard or fixed_i");
    }
    if (c.gaps != "all" && c.gaps != "largest_three") v.push_back("gaps must be all or largest_three");
    if (c.unfold_degree < 1) v.push_back("unfold_degree must be >= 1");
    if (c.hist_bins < 1 || !(c.hist_hi > c.hist_lo)) v.push_back("hist_bins needs lo < hi and count >= 1");
    if (c.size < 3) v.push_back("rmt needs at least three exponents per spectrum");
  }
  return v;
}

}  // namespace qlyap
