#include "brw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "brw/lattice.hpp"
#include "brw/offspring.hpp"

namespace brw {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out{};
  is >> out;
  if (is.fail() || !is.eof()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_number<int>("list", item));
  }
  return out;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "dim") {
    dim = parse_number<int>(key, v);
  } else if (key == "n") {
    n = parse_number<int>(key, v);
  } else if (key == "n_grid") {
    n_grid = parse_int_list(v);
  } else if (key == "offspring") {
    offspring = v;
  } else if (key == "reps") {
    reps = parse_number<std::int64_t>(key, v);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "conditioned") {
    conditioned = parse_bool(key, v);
  } else if (key == "clamp") {
    if (v == "none") {
      clamp_c.reset();
    } else {
      clamp_c = parse_number<double>(key, v);
    }
  } else if (key == "output") {
    output = v;
  } else if (key == "budget") {
    budget_seconds = parse_number<double>(key, v);
  } else if (key == "x") {
    target = parse_int_list(v);
  } else if (key == "ell") {
    ell = parse_number<int>(key, v);
  } else if (key == "theta") {
    theta = parse_number<double>(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::load(std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  load(in);
}

void RunConfig::validate(bool stochastic) const {
  check_dim(dim);
  if (n < 0) throw ConfigError("n must be >= 0");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  if (!n_grid.empty() && n_grid.front() < 0) throw ConfigError("n_grid entries must be >= 0");
  if (reps < 0) throw ConfigError("reps must be >= 0");
  if (stochastic && !seed) throw ConfigError("a seed is required for stochastic commands");
  if (clamp_c && !(*clamp_c > 0.0)) throw ConfigError("clamp constant must be > 0");
  if (!target.empty() && static_cast<int>(target.size()) != dim) {
    throw ConfigError("target x must have dim coordinates");
  }
  if (budget_seconds < 0.0) throw ConfigError("budget must be >= 0");
  OffspringDist::parse(offspring);
}

std::optional<int> RunConfig::clamp_radius_for(int gen) const {
  if (!clamp_c) return std::nullopt;
  return clamp_radius(gen, *clamp_c);
}

std::map<std::string, std::string> RunConfig::as_map() const {
  std::map<std::string, std::string> m;
  std::ostringstream c;
  if (clamp_c) {
    c << *clamp_c;
  } else {
    c << "none";
  }
  m["dim"] = std::to_string(dim);
  m["n"] = std::to_string(n);
  m["n_grid"] = join(n_grid);
  m["offspring"] = offspring;
  m["reps"] = std::to_string(reps);
  m["seed"] = seed ? std::to_string(*seed) : "";
  m["conditioned"] = conditioned ? "true" : "false";
  m["clamp"] = c.str();
  m["output"] = output;
  std::ostringstream b, t;
  b << budget_seconds;
  t << theta;
  m["budget"] = b.str();
  m["x"] = join(target);
  m["ell"] = std::to_string(ell);
  m["theta"] = t.str();
  return m;
}

std::string RunConfig::header() const {
  std::string s;
  for (const auto& [k, v] : as_map()) s += "# " + k + "=" + v + "\n";
  return s;
}

std::string schema_help() {
  return "config keys: dim (1..3), n, n_grid (comma list, increasing), offspring "
         "(binary | geometric:<r> | zeta:<alpha> | table:l=q,...), reps, seed (u64), "
         "conditioned (true|false), clamp (<c> | none), output, budget (seconds), "
         "x (comma list), ell, theta";
}

}  // namespace brw
