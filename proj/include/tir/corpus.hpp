// Benchmark programs: six hand-written scenarios that recreate the structural
// situations the toolchain is built for (irrelevant heavy paths, targets
// behind indirect calls, post-target bugs, signature collisions, multiple
// targets), plus a random program generator for property tests.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tir/ir.hpp"

namespace tir {

struct PlantedBug {
  std::string bug_id;
  // How the bug is reached: "direct", "indirect" or "post-target".
  std::string reachable_only_via;
  std::vector<uint8_t> witness;  // triggers the bug
};

struct CorpusProgram {
  std::string name;
  std::string source;  // .tir text
  TargetSpec targets;
  std::vector<PlantedBug> planted_bugs;
  std::vector<uint8_t> witness;  // hits at least one target
  std::string notes;
};

// The shipped scenario programs, in a fixed order.
const std::vector<CorpusProgram>& scenario_corpus();
const CorpusProgram* find_scenario(const std::string& name);

struct GeneratorParams {
  int functions = 4;           // <= 64
  int max_blocks_per_fn = 6;   // <= 32
  double indirect_fraction = 0.25;
  // Average number of functions sharing one signature; higher means more
  // indirect-call candidates per site.
  int signature_collision_factor = 2;
  uint64_t rng_seed = 1;
  bool back_edges = true;
  bool plant_bug = false;
  // When set, generation retries (with a derived seed) until a bounded
  // exhaustive input search finds a target-hitting witness.
  bool require_witness = true;
};

// Deterministic per params. Throws std::invalid_argument on out-of-bounds
// params and std::runtime_error when the witness search keeps failing.
CorpusProgram generate_random_program(const GeneratorParams& params);

}  // namespace tir
