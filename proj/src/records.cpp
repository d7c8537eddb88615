#include "brw/records.hpp"

#include <json.hpp>

namespace brw {
namespace {

using nlohmann::ordered_json;

ordered_json site_json(const Site& x, int dim) {
  ordered_json a = ordered_json::array();
  for (int k = 0; k < dim; ++k) a.push_back(x(k));
  return a;
}

}  // namespace

std::string forward_record(const GenStats& s, const ForwardRecordMeta& meta) {
  ordered_json j;
  j["rep"] = meta.rep;
  j["n"] = s.n;
  j["d"] = meta.dim;
  j["seed"] = meta.seed;
  j["conditioned"] = meta.conditioned;
  j["attempts"] = meta.attempts;
  j["Z"] = s.Z;
  j["V"] = s.V;
  j["Omega"] = s.Omega;
  // Trailing zeros of the multiplicity histogram are dropped; M[0] is unused.
  std::size_t last = 0;
  for (std::size_t i = 1; i < s.M.size(); ++i) {
    if (s.M[i] != 0) last = i;
  }
  j["M"] = std::vector<std::int64_t>(s.M.begin() + 1, s.M.begin() + 1 + last);
  j["overflow"] = {{"sites", s.overflow_sites}, {"mass", s.overflow_mass}};
  j["T"] = s.T ? ordered_json(*s.T) : ordered_json(nullptr);
  j["S"] = s.S ? site_json(*s.S, meta.dim) : ordered_json(nullptr);
  return j.dump();
}

std::string spine_record(const SpineSample& s, const SpineRecordMeta& meta) {
  ordered_json j;
  j["rep"] = s.rep;
  j["n"] = meta.n;
  j["seed"] = meta.seed;
  j["Tstar"] = s.t_star;
  j["Gamma"] = s.gamma;
  j["Delta"] = s.delta;
  if (meta.W) j["W"] = *meta.W;
  if (meta.ell) j["ell"] = *meta.ell;
  j["clamp_miss_count"] = s.clamp_misses;
  return j.dump();
}

std::string conditioned_record(int n, const Site& x, int dim, std::int64_t rep,
                               const ConditionedDraw& d) {
  ordered_json j;
  j["n"] = n;
  j["x"] = site_json(x, dim);
  j["rep"] = rep;
  j["value"] = d.value;
  j["path_len_checksum"] = d.path_checksum;
  return j.dump();
}

std::string chi_square_json(const ChiSquareResult& r, int n, const Site& x, int dim,
                            std::int64_t reps) {
  ordered_json j;
  j["n"] = n;
  j["x"] = site_json(x, dim);
  j["reps"] = reps;
  j["stat"] = r.stat;
  j["dof"] = r.dof;
  j["p"] = r.p_value;
  j["bins"] = r.bins;
  return j.dump();
}

std::string supersolution_json(const SupersolutionReport& r) {
  ordered_json j;
  j["params"] = {{"kappa", r.params.kappa}, {"beta", r.params.beta}};
  j["n_range"] = {r.n_lo, r.n_hi};
  j["x_factor"] = r.x_factor;
  j["holds"] = r.holds;
  j["min_margin"] = r.min_margin;
  j["argmin"] = {{"n", r.argmin_n}, {"x", site_json(r.argmin_x, 2)}};
  j["regime_min"] = {{"inner", r.regime_min[0]},
                     {"middle", r.regime_min[1]},
                     {"outer", r.regime_min[2]}};
  return j.dump();
}

std::string summary_json(const std::vector<SummaryEntry>& entries, std::uint64_t seed,
                         bool budget_exceeded) {
  ordered_json j;
  j["seed"] = seed;
  j["budget_exceeded"] = budget_exceeded;
  bool all = true;
  ordered_json arr = ordered_json::array();
  for (const auto& e : entries) {
    all = all && e.pass;
    arr.push_back({{"id", e.id}, {"name", e.name}, {"pass", e.pass}, {"detail", e.detail}});
  }
  j["criteria"] = arr;
  j["all_pass"] = all;
  return j.dump(2);
}

}  // namespace brw
