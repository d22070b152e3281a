// Replays a corpus against the marked program to compute the seven campaign
// metrics and deduplicate bugs (by primary location and by full stack).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tir/interp.hpp"
#include "tir/relevance.hpp"

namespace tir {

struct BugRecord {
  std::string bug_id;
  StackFrameRef primary_location;       // innermost frame of full_trace
  std::vector<StackFrameRef> full_trace;
  uint64_t first_hit_steps = 0;         // cumulative replay steps
};

struct ReplayReport {
  uint64_t unique_bugs = 0;    // distinct primary locations
  uint64_t unique_traces = 0;  // distinct full stacks
  std::optional<uint64_t> time_to_first_bug;  // replay steps, corpus order
  double target_relevant_coverage = 0;  // |relevant covered| / |relevant|
  uint64_t target_reaches = 0;
  uint64_t target_reaching_inputs = 0;
  double throughput = 0;  // inputs replayed per million replay steps

  uint64_t inputs = 0;
  uint64_t total_steps = 0;
  uint64_t relevant_total = 0;
  uint64_t relevant_covered = 0;
  std::vector<BugRecord> bugs;  // one per unique trace, in first-hit order
};

ReplayReport replay(const std::vector<std::vector<uint8_t>>& corpus,
                    const MarkedProgram& marked, uint64_t per_run_budget);

}  // namespace tir
