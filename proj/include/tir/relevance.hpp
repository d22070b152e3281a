// Relevant-block discovery: finds every basic block from which a declared
// target is still reachable, walks the inverse call graph bottom-up from the
// targets' parent functions, and inserts marker instructions that the pruner
// later classifies.
//
// Marker discipline (one marker per block, at the block's last relevance
// point):
//   - blocks whose terminator still leads toward a target, post-target
//     blocks, and blocks of required functions carry the marker as the last
//     non-terminating instruction ("keep the whole block");
//   - otherwise the marker sits immediately after the last reaching call or
//     target instruction ("run up to here, then the continuation is dead");
//   - irrelevant blocks carry no marker.
#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tir/callgraph.hpp"
#include "tir/ir.hpp"

namespace tir {

struct UnknownTargetError : std::runtime_error {
  std::string target_id;
  explicit UnknownTargetError(const std::string& id)
      : std::runtime_error("unknown target id '" + id + "'"), target_id(id) {}
};

struct TargetLocation {
  std::string target_id;
  std::string function;
  std::string block;
  uint32_t instr_id = 0;
};

using BlockRef = std::pair<std::string, std::string>;  // (function, label)

struct MarkedProgram {
  Program program;  // original program plus marker instructions
  TargetSpec spec;  // the targets this marking was computed for
  std::set<BlockRef> relevant_blocks;
  std::set<std::string> required_functions;
  std::set<std::string> target_reaching_functions;
};

// The Target instructions whose id is in `spec`, with parents resolved.
// Throws UnknownTargetError when an id names no instruction.
std::vector<TargetLocation> find_all_targets(const Program& p,
                                             const TargetSpec& spec);

// All blocks of `f` from which `start` is reachable over the intra-function
// CFG, including `start` itself. Iterative; terminates on cyclic CFGs.
std::set<std::string> inverse_dfs(const Function& f, const std::string& start);

// Copy of `p` with every marker instruction removed. Applied to a marked
// program this recovers the original, id-for-id.
Program strip_markers(const Program& p);

MarkedProgram find_relevant_blocks(const Program& p,
                                   const InverseCallGraph& icg,
                                   const TargetSpec& spec);

}  // namespace tir
