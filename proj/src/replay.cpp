#include "tir/replay.hpp"

#include <map>
#include <set>

#include "tir/layout.hpp"

namespace tir {

ReplayReport replay(const std::vector<std::vector<uint8_t>>& corpus,
                    const MarkedProgram& marked, uint64_t per_run_budget) {
  ReplayReport rep;
  Interpreter engine(marked.program);
  const Layout& lay = engine.layout();

  std::vector<bool> spec_target(engine.targets().size(), false);
  for (size_t i = 0; i < engine.targets().size(); ++i)
    spec_target[i] = marked.spec.target_ids.count(engine.targets()[i].id) > 0;
  std::vector<bool> relevant(lay.n_blocks, false);
  for (const BlockRef& br : marked.relevant_blocks) {
    int fi = lay.fn_index.at(br.first);
    relevant[lay.gbid(fi, lay.block_index[fi].at(br.second))] = true;
  }
  rep.relevant_total = marked.relevant_blocks.size();

  std::set<uint32_t> covered;
  std::set<StackFrameRef> primaries;
  std::map<std::vector<StackFrameRef>, size_t> traces;

  InterpOptions opt;
  opt.step_budget = per_run_budget;
  for (const auto& input : corpus) {
    ExecutionTrace tr = engine.run(input, opt);
    ++rep.inputs;
    rep.total_steps += tr.steps;
    uint64_t reaches = 0;
    for (int t : tr.targets_hit)
      if (spec_target[static_cast<size_t>(t)]) ++reaches;
    rep.target_reaches += reaches;
    if (reaches > 0) ++rep.target_reaching_inputs;
    for (uint32_t g : tr.blocks_covered)
      if (relevant[g]) covered.insert(g);
    if (tr.termination == Termination::BugTriggered) {
      if (!rep.time_to_first_bug) rep.time_to_first_bug = rep.total_steps;
      primaries.insert(tr.bug_stack.front());
      auto [it, fresh] = traces.emplace(tr.bug_stack, rep.bugs.size());
      if (fresh)
        rep.bugs.push_back(BugRecord{tr.bug_id, tr.bug_stack.front(),
                                     tr.bug_stack, rep.total_steps});
    }
  }

  rep.unique_bugs = primaries.size();
  rep.unique_traces = traces.size();
  rep.relevant_covered = covered.size();
  rep.target_relevant_coverage =
      rep.relevant_total == 0
          ? 0.0
          : static_cast<double>(rep.relevant_covered) /
                static_cast<double>(rep.relevant_total);
  rep.throughput = static_cast<double>(rep.inputs) * 1e6 /
                   static_cast<double>(std::max<uint64_t>(1, rep.total_steps));
  return rep;
}

}  // namespace tir
