#include "tir/prune.hpp"

namespace tir {

PrunedProgram prune(const Program& marked) {
  PrunedProgram out;
  out.program = marked;
  uint32_t next_id = max_synthetic_id(marked);

  for (Function& f : out.program.functions) {
    for (BasicBlock& b : f.blocks) {
      ++out.stats.blocks_total;

      int marker_at = -1;
      int n = static_cast<int>(b.instructions.size());
      for (int i = 0; i < n; ++i) {
        if (!b.instructions[i].is_marker()) continue;
        if (marker_at >= 0)
          throw PruneError("block '" + f.name + ":" + b.label +
                           "' carries more than one marker");
        marker_at = i;
      }

      size_t insert_at;
      if (marker_at < 0) {
        insert_at = 0;
        ++out.stats.blocks_fully_pruned;
        out.stats.fully_pruned_blocks.push_back({f.name, b.label});
      } else if (marker_at == n - 2) {
        // Marker is the last non-terminating instruction: skip the block.
        ++out.stats.blocks_kept;
        continue;
      } else {
        insert_at = static_cast<size_t>(marker_at);
        ++out.stats.blocks_partially_pruned;
      }

      Instruction exit_ins;
      exit_ins.id = ++next_id;
      exit_ins.body = ExitIns{0, true};
      b.instructions.insert(b.instructions.begin() + static_cast<long>(insert_at),
                            exit_ins);
    }
  }
  return out;
}

}  // namespace tir
