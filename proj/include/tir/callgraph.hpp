// Inverse call graph with call-site granularity. Indirect call sites are
// resolved statically by matching the site signature against every function
// in the module; exact structural equality, no subtyping.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tir/ir.hpp"

namespace tir {

struct CallSite {
  std::string caller;
  uint32_t instr_id = 0;
  bool indirect = false;
  Signature sig;                        // meaningful for indirect sites
  std::vector<std::string> candidates;  // resolved callees, sorted by name
};

struct InverseCallGraph {
  // Every function of the program appears as a key, even when never called.
  std::map<std::string, std::vector<CallSite>> callers_of;
  // One entry per call instruction, in program order.
  std::vector<CallSite> sites;
  // Indirect sites with zero signature matches are suspicious input; they stay
  // in the graph with empty candidate sets and are reported here.
  std::vector<std::string> warnings;
  bool signature_matching = true;
};

struct CallGraphOptions {
  // When false, indirect call sites resolve to nothing. This drops every
  // statically recovered indirect edge and exists for ablation experiments.
  bool signature_matching = true;
};

// All functions whose signature structurally equals `sig`, sorted by name.
std::vector<std::string> match_signatures(const Program& p, const Signature& sig);

InverseCallGraph build_inverse_call_graph(const Program& p,
                                          const CallGraphOptions& opts = {});

}  // namespace tir
