#pragma once

#include <cstdint>
#include <string>

#include "brw/conditioned_rep.hpp"
#include "brw/exact_fields.hpp"
#include "brw/forward_sim.hpp"
#include "brw/spine_sim.hpp"
#include "brw/stats.hpp"

namespace brw {

// One-line JSON renderings of run records. Doubles are printed in
// shortest round-trip form, so equal inputs give identical text.

struct ForwardRecordMeta {
  std::int64_t rep = 0;
  int dim = 2;
  std::uint64_t seed = 0;
  bool conditioned = false;
  std::int64_t attempts = 1;
};

std::string forward_record(const GenStats& s, const ForwardRecordMeta& meta);

struct SpineRecordMeta {
  int n = 0;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> W;
  std::optional<int> ell;
};

std::string spine_record(const SpineSample& s, const SpineRecordMeta& meta);

std::string conditioned_record(int n, const Site& x, int dim, std::int64_t rep,
                               const ConditionedDraw& d);

std::string chi_square_json(const ChiSquareResult& r, int n, const Site& x, int dim,
                            std::int64_t reps);

std::string supersolution_json(const SupersolutionReport& r);

struct SummaryEntry {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string summary_json(const std::vector<SummaryEntry>& entries, std::uint64_t seed,
                         bool budget_exceeded);

}  // namespace brw
