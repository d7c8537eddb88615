#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace brw {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Settings shared by every subcommand. A config file holds `key = value`
/// lines ('#' starts a comment); command-line flags override file values.
struct RunConfig {
  int dim = 2;
  int n = 0;
  std::vector<int> n_grid;
  std::string offspring = "binary";
  std::int64_t reps = 0;
  std::optional<std::uint64_t> seed;
  bool conditioned = false;
  std::optional<double> clamp_c = 6.0;  // empty means unclamped
  std::string output;                   // empty means stdout
  double budget_seconds = 0.0;          // 0 means unlimited
  std::vector<int> target;              // site x
  int ell = 0;
  double theta = 0.0;

  /// Applies one key/value pair; unknown keys and bad values raise ConfigError.
  void set(const std::string& key, const std::string& value);
  void load(std::istream& is);
  void load_file(const std::string& path);

  /// Checks invariants; stochastic commands require a seed.
  void validate(bool stochastic) const;

  std::optional<int> clamp_radius_for(int n) const;

  /// Every setting as `# key=value` lines, for report headers.
  std::string header() const;
  std::map<std::string, std::string> as_map() const;
};

std::vector<int> parse_int_list(const std::string& s);
std::string schema_help();

}  // namespace brw
