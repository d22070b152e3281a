// Coverage-guided greybox fuzzing over the interpreter, with three
// directedness modes: pruning (execute the pruned program, discard runs that
// end in a pruner exit), minimization (schedule seeds by mean static block
// distance to the targets, annealed from exploration to exploitation), and
// plain (uniform scheduling, the control condition).
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tir/callgraph.hpp"
#include "tir/interp.hpp"
#include "tir/ir.hpp"
#include "tir/prune.hpp"
#include "tir/relevance.hpp"

namespace tir {

// Deterministic 64-bit generator (splitmix64). All randomness in the fuzzer
// flows through this so campaigns reproduce bit-for-bit.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  uint64_t below(uint64_t n) { return n ? next() % n : 0; }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline constexpr size_t kMaxInputLen = 4096;
inline constexpr uint32_t kInfiniteDistance = std::numeric_limits<uint32_t>::max();

enum class MutOp : int {
  BitFlip = 0,
  ByteSet,
  ByteDelete,
  ByteInsert,
  BlockDuplicate,
  InterestingValue,
  kCount
};

struct MutationWeights {
  double w[static_cast<int>(MutOp::kCount)] = {1, 1, 1, 1, 1, 1};
  double& operator[](MutOp op) { return w[static_cast<int>(op)]; }
  double operator[](MutOp op) const { return w[static_cast<int>(op)]; }
};

// Applies a single mutation operation in place.
void apply_mutation_op(MutOp op, std::vector<uint8_t>& data, Rng& rng);

// Stacks 1..16 weighted operations; output length stays within
// [0, kMaxInputLen].
std::vector<uint8_t> mutate(const std::vector<uint8_t>& input, Rng& rng,
                            const MutationWeights& weights);

// Minimum interprocedural hop count from each block to any target's block
// (successor, call and return edges all cost 1), kInfiniteDistance when no
// target is reachable. Indexed by the global block ids of Layout::build(p).
std::vector<uint32_t> static_block_distances(const Program& p,
                                             const InverseCallGraph& icg,
                                             const TargetSpec& spec);

enum class FuzzMode { Pruning, Minimization, Plain };
const char* to_string(FuzzMode m);

struct CampaignConfig {
  FuzzMode mode = FuzzMode::Plain;
  std::vector<std::vector<uint8_t>> seeds;
  uint64_t exec_budget = 0;     // cumulative interpreter steps
  uint64_t per_run_budget = 0;  // steps per execution
  uint64_t rng_seed = 1;
  MutationWeights weights;
  // Optional distance-based seed energy in pruning mode (experimental knob;
  // default is coverage-only scheduling).
  bool distance_energy = false;
  // When > 0, the stop condition is wall time instead of the step budget.
  // Wall-clock campaigns are not reproducible and exist for demo runs.
  double wall_clock_seconds = 0;
};

struct SeedEntry {
  std::vector<uint8_t> input;
  uint64_t coverage_key = 0;  // signature of the run's bucketed edge counts
  double distance = 0;        // mean finite block distance, +inf if none
  double energy = 1;
};

struct CampaignBug {
  std::string bug_id;
  StackFrameRef primary;              // innermost frame
  std::vector<StackFrameRef> stack;   // innermost first
  uint64_t first_hit_steps = 0;       // cumulative steps at the end of the run
};

struct CampaignStats {
  uint64_t executions = 0;
  uint64_t total_steps = 0;
  uint64_t target_reaches = 0;          // total target hits across runs
  uint64_t target_reaching_inputs = 0;  // runs with at least one hit
  std::vector<std::string> relevant_blocks_covered;  // sorted "fn:label"
  std::vector<CampaignBug> bugs;  // unique by full stack, discovery order
  double throughput = 0;          // executions per million steps
  uint64_t pruned_exits = 0;
  uint64_t queue_size = 0;
  uint64_t corpus_saved = 0;
};

struct CampaignResult {
  CampaignStats stats;
  // Saved inputs in discovery order: initial seeds, novelty-bearing mutants
  // and bug-triggering inputs. Pruner-exit runs are never saved.
  std::vector<std::vector<uint8_t>> corpus;
};

// Everything derived from (program, targets) that campaigns share.
struct CampaignContext {
  Program original;
  InverseCallGraph icg;
  MarkedProgram marked;
  PrunedProgram pruned;
  TargetSpec spec;
  std::vector<uint32_t> distances;  // per gbid

  static CampaignContext prepare(const Program& p, const TargetSpec& spec,
                                 bool signature_matching = true);
};

// Throws std::invalid_argument on an empty seed list or a zero budget.
CampaignResult run_campaign(const CampaignContext& ctx, const CampaignConfig& cfg);

}  // namespace tir
