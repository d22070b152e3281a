// Test-only oracles, kept independent of the analysis implementations they
// check. The reachability oracle builds the exploded supergraph explicitly
// (one node per instruction) and answers by plain BFS.
#pragma once

#include <set>
#include <string>

#include "tir/ir.hpp"
#include "tir/relevance.hpp"

namespace tir::testing {

// A block is relevant iff some supergraph path from its first instruction
// reaches a declared target, or it is forward-reachable (within its own
// function) from a target's block. Matches the over-approximations of the
// static analysis: calls may dispatch to any signature-equal function, every
// call is assumed to return, returns flow to every call site of the function,
// and bug/exit instructions fall through.
std::set<BlockRef> oracle_relevant_blocks(const Program& p,
                                          const TargetSpec& spec,
                                          bool signature_matching = true);

// Plain forward-BFS path oracle over one function's block graph.
bool oracle_path_exists(const Function& f, const std::string& from,
                        const std::string& to);

}  // namespace tir::testing
