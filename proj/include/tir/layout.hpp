// Flat index over a validated program: function/block numbering, global block
// ids, intra-procedural CFG edges. Shared scaffolding for the analyses.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tir/ir.hpp"

namespace tir {

struct Layout {
  const Program* prog = nullptr;

  std::map<std::string, int> fn_index;
  // Per function: label -> block index.
  std::vector<std::map<std::string, int>> block_index;
  // Global block id = block_base[fn] + block index.
  std::vector<uint32_t> block_base;
  uint32_t n_blocks = 0;

  // Intra-procedural successor/predecessor block ids (from terminators).
  std::vector<std::vector<uint32_t>> succ;
  std::vector<std::vector<uint32_t>> pred;
  // True when the block's final instruction is `ret`.
  std::vector<bool> ends_in_ret;

  static Layout build(const Program& p);

  int fn_of_block(uint32_t gbid) const;
  int local_block(uint32_t gbid) const;
  uint32_t gbid(int fn, int blk) const { return block_base[fn] + blk; }
  uint32_t entry_gbid(int fn) const { return block_base[fn]; }
  const Function& fn(int idx) const { return prog->functions[idx]; }
  const BasicBlock& block(uint32_t gbid) const;
  // "function:label", the external name for a block.
  std::string block_name(uint32_t gbid) const;
};

}  // namespace tir
