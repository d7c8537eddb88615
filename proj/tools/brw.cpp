// brw: command-line driver for critical branching random walk experiments.
//
//   brw simulate    --n N --reps R --seed S [--conditioned] ...   forward-run JSONL
//   brw spine       --n N --reps R --seed S [--ell L]              spine JSONL
//   brw exact KIND  --n N [--dim D] [--x a,b] ...                  field CSV / JSON
//   brw conditioned --n N --x a,b --reps R --seed S               conditional-law JSONL
//   brw verify      --suite NAME --seed S [--budget SEC]           report CSV
//   brw report      --input report.csv [--json]                    pass/fail summary

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "brw/conditioned_rep.hpp"
#include "brw/config.hpp"
#include "brw/exact_fields.hpp"
#include "brw/forward_sim.hpp"
#include "brw/parallel.hpp"
#include "brw/records.hpp"
#include "brw/spine_sim.hpp"
#include "brw/stats.hpp"
#include "brw/verify.hpp"

using namespace brw;

namespace {

constexpr int kUsageError = 64;
constexpr int kBudgetExit = 3;

// Stream id for ball counts attached to spine records.
constexpr std::uint64_t kBallStream = 0x100 + static_cast<std::uint64_t>(Stream::kSpine);

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw ConfigError("cannot open output file " + path);
      os = file.get();
    }
  }
};

// Run metadata that varies between replays goes to a sidecar next to the
// output file, never into the primary output.
void write_sidecar(const RunConfig& cfg, const std::string& command, double seconds) {
  if (cfg.output.empty()) return;
  std::ofstream meta(cfg.output + ".meta");
  const std::time_t now = std::time(nullptr);
  meta << "# command=" << command << "\n" << cfg.header() << "# finished="
       << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << "\n# seconds=" << seconds
       << "\n# workers=" << worker_count() << "\n";
}

Site target_site(const RunConfig& cfg) {
  Site x = Site::Zero();
  for (std::size_t k = 0; k < cfg.target.size(); ++k) x(static_cast<int>(k)) = cfg.target[k];
  return x;
}

// String-valued flags that map one-to-one onto RunConfig keys.
struct Flags {
  std::map<std::string, std::string> values;
  std::string config_file;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    app->add_option("--" + key, values[key], help);
  }

  RunConfig resolve(CLI::App* app) {
    RunConfig cfg;
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& [key, value] : values) {
      if (app->count("--" + key) > 0) cfg.set(key, value);
    }
    return cfg;
  }
};

int cmd_simulate(const RunConfig& cfg) {
  cfg.validate(true);
  const OffspringDist dist = OffspringDist::parse(cfg.offspring);
  const std::uint64_t seed = *cfg.seed;
  const Stream stream = cfg.conditioned ? Stream::kConditioned : Stream::kForward;
  const auto runs = map_replicates(cfg.reps, [&](std::int64_t r) {
    Rng rng = make_stream(seed, stream, static_cast<std::uint64_t>(r));
    return cfg.conditioned ? run_conditioned(dist, cfg.n, cfg.dim, rng)
                           : run(dist, cfg.n, cfg.dim, rng);
  });
  Output out(cfg.output);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    ForwardRecordMeta meta{static_cast<std::int64_t>(r), cfg.dim, seed, cfg.conditioned,
                           runs[r].attempts};
    *out.os << forward_record(runs[r].stats, meta) << '\n';
  }
  return 0;
}

int cmd_spine(const RunConfig& cfg) {
  cfg.validate(true);
  if (cfg.offspring != "binary") throw ConfigError("spine sampler supports offspring=binary only");
  SpineBatchConfig b;
  b.n = cfg.n;
  b.dim = cfg.dim;
  b.reps = cfg.reps;
  b.seed = *cfg.seed;
  b.clamp_c = cfg.clamp_c.value_or(6.0);
  const auto samples = sample_gamma_delta(b);
  std::vector<std::int64_t> w;
  if (cfg.ell > 0) {
    w = map_replicates(cfg.reps, [&](std::int64_t r) {
      Rng rng = make_stream(b.seed, kBallStream, static_cast<std::uint64_t>(r));
      return sample_ball(cfg.n, cfg.ell, cfg.dim, rng).W;
    });
  }
  Output out(cfg.output);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    SpineRecordMeta meta{cfg.n, b.seed};
    if (cfg.ell > 0) {
      meta.W = w[r];
      meta.ell = cfg.ell;
    }
    *out.os << spine_record(samples[r], meta) << '\n';
  }
  return 0;
}

void emit_field(std::ostream& os, const RunConfig& cfg, const std::string& kind, const Field& f) {
  if (!cfg.target.empty()) {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["n"] = cfg.n;
    j["x"] = cfg.target;
    j["value"] = f(target_site(cfg));
    j["tail_bound"] = f.tail_bound();
    os << j.dump() << '\n';
    return;
  }
  std::ostringstream body;
  write_field_csv(body, f);
  const std::string text = body.str();
  const auto eol = text.find('\n');
  os << text.substr(0, eol + 1) << "# kind=" << kind << '\n' << cfg.header()
     << text.substr(eol + 1);
}

int cmd_exact(const std::string& kind, const RunConfig& cfg) {
  cfg.validate(false);
  const OffspringDist dist = OffspringDist::parse(cfg.offspring);
  const std::optional<int> clamp = cfg.clamp_radius_for(cfg.n);
  Output out(cfg.output);
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["n"] = cfg.n;
  j["d"] = cfg.dim;
  j["offspring"] = dist.tag();
  if (kind == "p-field") {
    emit_field(*out.os, cfg, kind, transition_field(cfg.n, cfg.dim, clamp));
  } else if (kind == "u-field") {
    emit_field(*out.os, cfg, kind, hitting_field(dist, cfg.n, cfg.dim, clamp));
  } else if (kind == "mgf") {
    emit_field(*out.os, cfg, kind, mgf_field(dist, cfg.n, cfg.theta, cfg.dim, clamp));
  } else if (kind == "h-field") {
    emit_field(*out.os, cfg, kind, dominating_field(dist, cfg.n, cfg.theta, cfg.dim, clamp));
  } else if (kind == "second-moment") {
    emit_field(*out.os, cfg, kind, second_moment_field(dist, cfg.n, cfg.dim, clamp));
  } else if (kind == "survival") {
    const double s = survival_prob(dist, cfg.n);
    j["s_n"] = s;
    j["n_s_n"] = cfg.n * s;
    j["limit"] = 2.0 / dist.sigma2();
    *out.os << j.dump() << '\n';
  } else if (kind == "mean-occupied") {
    const OccupiedMean m = mean_occupied(dist, cfg.n, cfg.dim, clamp);
    j["value"] = m.value;
    j["tail_bound"] = m.tail_bound;
    *out.os << j.dump() << '\n';
  } else if (kind == "gamma-mean") {
    j["value"] = exact_mean_gamma(cfg.n, cfg.dim, cfg.clamp_c.value_or(6.0));
    *out.os << j.dump() << '\n';
  } else if (kind == "supersolution") {
    const SuperSolutionParams params{super_kappa()};
    const auto n0 = find_supersolution_n0(params, std::max(cfg.n, 64));
    if (!n0) {
      j["holds"] = false;
      j["detail"] = "no N0 found";
      *out.os << j.dump() << '\n';
      return 1;
    }
    *out.os << supersolution_json(verify_supersolution(params, *n0, 4 * *n0)) << '\n';
  } else {
    throw ConfigError("unknown exact kind '" + kind +
                      "' (p-field | u-field | mgf | h-field | second-moment | survival | "
                      "mean-occupied | supersolution | gamma-mean)");
  }
  return 0;
}

int cmd_conditioned(const RunConfig& cfg, const std::string& report_path) {
  cfg.validate(true);
  if (cfg.offspring != "binary") throw ConfigError("conditioned law supports offspring=binary only");
  if (cfg.target.empty()) throw ConfigError("conditioned needs a target --x");
  const Site x = target_site(cfg);
  const UFieldBank bank(cfg.n, cfg.dim);
  const auto draws = sample_conditioned_batch(bank, x, cfg.reps, *cfg.seed);
  Output out(cfg.output);
  for (std::size_t r = 0; r < draws.size(); ++r) {
    *out.os << conditioned_record(cfg.n, x, cfg.dim, static_cast<std::int64_t>(r), draws[r]) << '\n';
  }
  if (cfg.n <= 12 && cfg.reps > 0) {
    const PmfField pmf = pmf_oracle(OffspringDist::binary(), cfg.n, cfg.dim);
    const Eigen::ArrayXd p = pmf.pmf(x);
    std::vector<double> probs;
    for (Eigen::Index k = 1; k < p.size(); ++k) probs.push_back(p(k) / (1.0 - p(0)));
    std::vector<std::int64_t> hist(probs.size() + 1, 0);
    for (const auto& d : draws) ++hist[std::min<std::size_t>(d.value - 1, hist.size() - 1)];
    const std::string chi = chi_square_json(chi_square(hist, probs), cfg.n, x, cfg.dim, cfg.reps);
    if (report_path.empty()) {
      std::cerr << chi << '\n';
    } else {
      std::ofstream(report_path) << chi << '\n';
    }
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, double scale,
               const std::string& summary_path) {
  cfg.validate(true);
  VerifyOptions opts;
  opts.seed = *cfg.seed;
  opts.budget_seconds = cfg.budget_seconds;
  opts.scale = scale;
  const auto ids = suite_criteria(suite);
  Output out(cfg.output);
  *out.os << "# suite=" << suite << "\n# scale=" << scale << '\n' << cfg.header();
  write_report_header(*out.os);
  const SuiteResult res = run_suite(ids, opts, [&](const CriterionResult& r) {
    for (const auto& row : r.rows) write_report_row(*out.os, row);
    std::cerr << (r.skipped ? "[SKIP] " : r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' '
              << r.name << ": " << r.detail << " (" << std::fixed << std::setprecision(1)
              << r.seconds << " s)" << std::defaultfloat << '\n';
  });
  if (!summary_path.empty()) {
    std::vector<SummaryEntry> entries;
    for (const auto& r : res.results) entries.push_back({r.id, r.name, r.pass, r.detail});
    std::ofstream(summary_path) << summary_json(entries, opts.seed, res.budget_exceeded) << '\n';
  }
  if (res.budget_exceeded) {
    *out.os << "# partial report: budget exceeded\n";
    return kBudgetExit;
  }
  return res.all_pass() ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& inputs, bool as_json) {
  std::vector<ReportRow> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report " + path);
    // Skip provenance comments ahead of the CSV header.
    std::stringstream body;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '#') continue;
      body << line << '\n';
    }
    auto more = read_report_csv(body);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  std::map<std::string, std::pair<int, int>> by_tag;  // passes, total
  for (const auto& r : rows) {
    auto& [p, t] = by_tag[r.tag];
    p += r.pass ? 1 : 0;
    ++t;
  }
  bool all = true;
  if (as_json) {
    nlohmann::ordered_json j;
    for (const auto& [tag, pt] : by_tag) {
      j["tags"][tag] = {{"pass", pt.first == pt.second}, {"rows", pt.second}, {"failed", pt.second - pt.first}};
      all = all && pt.first == pt.second;
    }
    j["all_pass"] = all;
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& [tag, pt] : by_tag) {
      const bool ok = pt.first == pt.second;
      all = all && ok;
      std::cout << (ok ? "PASS " : "FAIL ") << tag << "  " << pt.first << '/' << pt.second << " rows\n";
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical branching random walks on Z^d: simulation, exact fields, checks"};
  app.require_subcommand(1);

  auto common = [](CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_file, "key = value config file");
    f.add(sub, "n", "generation");
    f.add(sub, "dim", "lattice dimension (1-3)");
    f.add(sub, "offspring", "binary | geometric:<r> | zeta:<alpha> | table:l=q,...");
    f.add(sub, "output", "output path (default stdout)");
  };
  auto stochastic = [](CLI::App* sub, Flags& f) {
    f.add(sub, "reps", "replicates");
    f.add(sub, "seed", "64-bit master seed");
  };

  Flags sim_f, spine_f, exact_f, cond_f, ver_f;

  auto* sim = app.add_subcommand("simulate", "forward runs, one JSON record per replicate");
  common(sim, sim_f);
  stochastic(sim, sim_f);
  bool sim_conditioned = false;
  sim->add_flag("--conditioned", sim_conditioned, "condition on survival to generation n");

  auto* spine = app.add_subcommand("spine", "size-biased spine samples");
  common(spine, spine_f);
  stochastic(spine, spine_f);
  spine_f.add(spine, "ell", "ball radius for W (0 = off)");
  spine_f.add(spine, "clamp", "clamp constant or none");

  auto* exact = app.add_subcommand("exact", "exact fields and scalars");
  std::string kind;
  exact->add_option("kind", kind, "p-field | u-field | mgf | h-field | second-moment | survival | "
                                  "mean-occupied | supersolution | gamma-mean")
      ->required();
  common(exact, exact_f);
  exact_f.add(exact, "x", "report the value at this site only");
  exact_f.add(exact, "theta", "mgf parameter");
  exact_f.add(exact, "clamp", "clamp constant or none");

  auto* cond = app.add_subcommand("conditioned", "conditional law of U_n(x) given U_n(x) >= 1");
  common(cond, cond_f);
  stochastic(cond, cond_f);
  cond_f.add(cond, "x", "target site");
  std::string chi_path;
  cond->add_option("--chi-square", chi_path, "path for the chi-square JSON (default stderr)");

  auto* ver = app.add_subcommand("verify", "run acceptance criteria");
  std::string suite = "all";
  double scale = 1.0;
  std::string summary_path;
  ver->add_option("--suite", suite, "all | fundamental | exact | simulation | spine | conditioned | ids");
  ver->add_option("--config", ver_f.config_file, "key = value config file");
  ver_f.add(ver, "seed", "64-bit master seed");
  ver_f.add(ver, "budget", "wall-clock budget in seconds (0 = none)");
  ver_f.add(ver, "output", "report CSV path (default stdout)");
  ver->add_option("--scale", scale, "sample-size multiplier");
  ver->add_option("--summary", summary_path, "pass/fail summary JSON path");

  auto* rep = app.add_subcommand("report", "summarize report CSV files");
  std::vector<std::string> inputs;
  bool as_json = false;
  rep->add_option("--input", inputs, "report CSV files")->required();
  rep->add_flag("--json", as_json, "machine-readable summary");

  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    if (*sim) {
      RunConfig cfg = sim_f.resolve(sim);
      if (sim_conditioned) cfg.conditioned = true;
      const int rc = cmd_simulate(cfg);
      write_sidecar(cfg, "simulate", elapsed());
      return rc;
    }
    if (*spine) {
      const RunConfig cfg = spine_f.resolve(spine);
      const int rc = cmd_spine(cfg);
      write_sidecar(cfg, "spine", elapsed());
      return rc;
    }
    if (*exact) {
      const RunConfig cfg = exact_f.resolve(exact);
      return cmd_exact(kind, cfg);
    }
    if (*cond) {
      const RunConfig cfg = cond_f.resolve(cond);
      const int rc = cmd_conditioned(cfg, chi_path);
      write_sidecar(cfg, "conditioned", elapsed());
      return rc;
    }
    if (*ver) {
      const RunConfig cfg = ver_f.resolve(ver);
      const int rc = cmd_verify(cfg, suite, scale, summary_path);
      write_sidecar(cfg, "verify", elapsed());
      return rc;
    }
    if (*rep) return cmd_report(inputs, as_json);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n' << schema_help() << '\n';
    return kUsageError;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudgetExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
