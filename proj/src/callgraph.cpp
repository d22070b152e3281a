#include "tir/callgraph.hpp"

#include <algorithm>

namespace tir {

std::vector<std::string> match_signatures(const Program& p,
                                          const Signature& sig) {
  std::vector<std::string> out;
  for (const Function& f : p.functions)
    if (f.signature() == sig) out.push_back(f.name);
  std::sort(out.begin(), out.end());
  return out;
}

InverseCallGraph build_inverse_call_graph(const Program& p,
                                          const CallGraphOptions& opts) {
  InverseCallGraph g;
  g.signature_matching = opts.signature_matching;
  for (const Function& f : p.functions) g.callers_of[f.name];

  for (const Function& f : p.functions) {
    for (const BasicBlock& b : f.blocks) {
      for (const Instruction& ins : b.instructions) {
        CallSite site;
        site.caller = f.name;
        site.instr_id = ins.id;
        if (auto* cd = ins.as<CallDirectIns>()) {
          site.indirect = false;
          site.candidates = {cd->callee};
        } else if (auto* ci = ins.as<CallIndirectIns>()) {
          site.indirect = true;
          site.sig = ci->sig;
          if (opts.signature_matching)
            site.candidates = match_signatures(p, ci->sig);
          if (site.candidates.empty() && opts.signature_matching)
            g.warnings.push_back("indirect call site " +
                                 std::to_string(ins.id) + " in '" + f.name +
                                 "' has no signature matches");
        } else {
          continue;
        }
        for (const std::string& callee : site.candidates)
          g.callers_of[callee].push_back(site);
        g.sites.push_back(std::move(site));
      }
    }
  }
  return g;
}

}  // namespace tir
