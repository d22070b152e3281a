// Block pruning: rewrites a marked program so execution terminates with a
// normal exit as soon as control enters flow that cannot reach a target.
//   - no marker in the block: exit inserted as the first instruction;
//   - marker is the last non-terminating instruction: block kept unchanged;
//   - marker anywhere else: exit inserted immediately before it.
// Exit code 0 keeps these terminations classified as normal, never as crashes.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tir/relevance.hpp"

namespace tir {

struct PruneStats {
  uint64_t blocks_total = 0;
  uint64_t blocks_fully_pruned = 0;
  uint64_t blocks_partially_pruned = 0;
  uint64_t blocks_kept = 0;
  std::vector<BlockRef> fully_pruned_blocks;
};

struct PrunedProgram {
  Program program;  // markers retained, pruner exits inserted
  PruneStats stats;
};

struct PruneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws PruneError when a block carries markers the classification above
// cannot handle (more than one per block); that signals a marking bug.
PrunedProgram prune(const Program& marked);
inline PrunedProgram prune(const MarkedProgram& mp) { return prune(mp.program); }

}  // namespace tir
