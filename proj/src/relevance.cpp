#include "tir/relevance.hpp"

#include <algorithm>
#include <map>

#include "tir/layout.hpp"

namespace tir {

std::vector<TargetLocation> find_all_targets(const Program& p,
                                             const TargetSpec& spec) {
  std::vector<TargetLocation> out;
  std::set<std::string> seen;
  for (const Function& f : p.functions)
    for (const BasicBlock& b : f.blocks)
      for (const Instruction& ins : b.instructions)
        if (auto* t = ins.as<TargetIns>())
          if (spec.target_ids.count(t->id)) {
            out.push_back(TargetLocation{t->id, f.name, b.label, ins.id});
            seen.insert(t->id);
          }
  for (const std::string& id : spec.target_ids)
    if (!seen.count(id)) throw UnknownTargetError(id);
  return out;
}

std::set<std::string> inverse_dfs(const Function& f, const std::string& start) {
  std::map<std::string, std::vector<std::string>> preds;
  for (const BasicBlock& b : f.blocks) {
    const Instruction& term = b.instructions.back();
    if (auto* br = term.as<BrIns>()) {
      preds[br->if_true].push_back(b.label);
      preds[br->if_false].push_back(b.label);
    } else if (auto* j = term.as<JmpIns>()) {
      preds[j->label].push_back(b.label);
    }
  }
  std::set<std::string> seen{start};
  std::vector<std::string> work{start};
  while (!work.empty()) {
    std::string cur = work.back();
    work.pop_back();
    for (const std::string& pr : preds[cur])
      if (seen.insert(pr).second) work.push_back(pr);
  }
  return seen;
}

namespace {

// Internal flat view, built on the marker-stripped program.
struct Pass {
  const Program& prog;
  const InverseCallGraph& icg;
  Layout lay;

  struct CallInfo {
    int pos;                      // instruction index within the block
    std::vector<int> candidates;  // callee function indices
  };
  std::vector<std::vector<CallInfo>> calls;     // per gbid
  std::vector<std::vector<int>> spec_targets;   // per gbid: positions
  std::vector<std::vector<std::pair<uint32_t, int>>> sites_of;  // fn -> (gbid,pos)

  std::vector<bool> rel;        // per gbid: a spec target is reachable
  std::vector<bool> retreach;   // per gbid: some ret block is reachable
  std::vector<bool> retcont;    // per fn: a call site's continuation is live
  std::vector<bool> post;       // per gbid: forward-reachable from a target

  Pass(const Program& p, const InverseCallGraph& g, const TargetSpec& spec)
      : prog(p), icg(g), lay(Layout::build(p)) {
    int nf = static_cast<int>(p.functions.size());
    calls.resize(lay.n_blocks);
    spec_targets.resize(lay.n_blocks);
    sites_of.resize(nf);
    rel.assign(lay.n_blocks, false);
    retreach.assign(lay.n_blocks, false);
    retcont.assign(nf, false);
    post.assign(lay.n_blocks, false);

    std::map<uint32_t, const CallSite*> site_by_id;
    for (const CallSite& s : icg.sites) site_by_id[s.instr_id] = &s;

    for (int fi = 0; fi < nf; ++fi) {
      const Function& f = p.functions[fi];
      for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
        uint32_t g = lay.gbid(fi, static_cast<int>(bi));
        const auto& ins = f.blocks[bi].instructions;
        for (size_t ii = 0; ii < ins.size(); ++ii) {
          if (auto* t = ins[ii].as<TargetIns>()) {
            if (spec.target_ids.count(t->id))
              spec_targets[g].push_back(static_cast<int>(ii));
          } else if (ins[ii].is_call()) {
            CallInfo ci;
            ci.pos = static_cast<int>(ii);
            auto it = site_by_id.find(ins[ii].id);
            if (it != site_by_id.end())
              for (const std::string& c : it->second->candidates)
                ci.candidates.push_back(lay.fn_index.at(c));
            for (int cand : ci.candidates) sites_of[cand].push_back({g, ci.pos});
            calls[g].push_back(std::move(ci));
          }
        }
      }
    }

    // retreach: reverse closure from ret-terminated blocks.
    {
      std::vector<uint32_t> work;
      for (uint32_t g = 0; g < lay.n_blocks; ++g)
        if (lay.ends_in_ret[g]) {
          retreach[g] = true;
          work.push_back(g);
        }
      while (!work.empty()) {
        uint32_t cur = work.back();
        work.pop_back();
        for (uint32_t pr : lay.pred[cur])
          if (!retreach[pr]) {
            retreach[pr] = true;
            work.push_back(pr);
          }
      }
    }
  }

  bool entry_hits(int fn) const { return rel[lay.entry_gbid(fn)]; }

  // An "event" is a point in the block past which relevance may still hold:
  // a declared target, or a call that can reach one.
  int last_event_pos(uint32_t g) const {
    int last = -1;
    for (int p : spec_targets[g]) last = std::max(last, p);
    for (const CallInfo& c : calls[g])
      for (int cand : c.candidates)
        if (entry_hits(cand)) {
          last = std::max(last, c.pos);
          break;
        }
    return last;
  }

  bool after_point_live(uint32_t g, int pos) const {
    if (last_event_pos(g) > pos) return true;
    for (uint32_t s : lay.succ[g])
      if (rel[s]) return true;
    return retreach[g] && retcont[lay.fn_of_block(g)];
  }

  void solve(const std::vector<TargetLocation>& targets) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (uint32_t g = 0; g < lay.n_blocks; ++g) {
        if (rel[g]) continue;
        bool r = !spec_targets[g].empty();
        if (!r)
          for (const CallInfo& c : calls[g]) {
            for (int cand : c.candidates)
              if (entry_hits(cand)) {
                r = true;
                break;
              }
            if (r) break;
          }
        if (!r)
          for (uint32_t s : lay.succ[g])
            if (rel[s]) {
              r = true;
              break;
            }
        if (!r) r = retreach[g] && retcont[lay.fn_of_block(g)];
        if (r) {
          rel[g] = true;
          changed = true;
        }
      }
      for (size_t fi = 0; fi < prog.functions.size(); ++fi) {
        if (retcont[fi]) continue;
        for (auto [g, pos] : sites_of[fi])
          if (after_point_live(g, pos)) {
            retcont[fi] = true;
            changed = true;
            break;
          }
      }
    }

    // Post-target region: forward closure from each target's block, within
    // its own function. Interprocedural continuation past a return is cut by
    // the caller-side marker, so the closure stays intra-procedural.
    for (const TargetLocation& t : targets) {
      int fi = lay.fn_index.at(t.function);
      uint32_t g0 = lay.gbid(fi, lay.block_index[fi].at(t.block));
      std::vector<uint32_t> work{g0};
      post[g0] = true;
      while (!work.empty()) {
        uint32_t cur = work.back();
        work.pop_back();
        for (uint32_t s : lay.succ[cur])
          if (!post[s]) {
            post[s] = true;
            work.push_back(s);
          }
      }
    }
  }

  // Marker placement for one block given the current required set.
  // Returns -1 for "no marker", otherwise the insertion index into the
  // block's instruction list (trailing == just before the terminator).
  enum class Mark { None, Trailing, AfterEvent };
  Mark classify(uint32_t g, const std::vector<bool>& required_fn,
                int* event_pos) const {
    int fi = lay.fn_of_block(g);
    if (required_fn[fi]) return Mark::Trailing;
    if (post[g]) return Mark::Trailing;
    if (!rel[g]) return Mark::None;
    bool keep = retreach[g] && retcont[fi];
    if (!keep)
      for (uint32_t s : lay.succ[g])
        if (rel[s] || post[s]) {
          keep = true;
          break;
        }
    if (keep) return Mark::Trailing;
    int e = last_event_pos(g);
    // A relevant block with no live tail always has an event.
    *event_pos = e;
    return Mark::AfterEvent;
  }

  std::vector<bool> compute_required() {
    std::vector<bool> required(prog.functions.size(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (uint32_t g = 0; g < lay.n_blocks; ++g) {
        int e = -1;
        Mark m = classify(g, required, &e);
        if (m == Mark::None) continue;
        // Calls strictly before the marker point keep their callees whole;
        // the reaching call at the marker point itself stays prunable inside.
        int limit = m == Mark::Trailing
                        ? static_cast<int>(lay.block(g).instructions.size())
                        : e;
        for (const CallInfo& c : calls[g]) {
          if (c.pos >= limit) continue;
          for (int cand : c.candidates)
            if (!required[cand]) {
              required[cand] = true;
              changed = true;
            }
        }
      }
    }
    return required;
  }
};

}  // namespace

Program strip_markers(const Program& p) {
  Program out = p;
  for (Function& f : out.functions)
    for (BasicBlock& b : f.blocks)
      std::erase_if(b.instructions,
                    [](const Instruction& i) { return i.is_marker(); });
  return out;
}

MarkedProgram find_relevant_blocks(const Program& p,
                                   const InverseCallGraph& icg,
                                   const TargetSpec& spec) {
  // Re-running the pass must be a no-op: work on the marker-free program.
  Program base = strip_markers(p);
  std::vector<TargetLocation> targets = find_all_targets(base, spec);

  Pass pass(base, icg, spec);
  pass.solve(targets);
  std::vector<bool> required = pass.compute_required();

  MarkedProgram out;
  out.program = base;
  out.spec = spec;

  // Coarse caller closure over the inverse call graph, reported alongside the
  // precise block-level result.
  {
    std::vector<std::string> work;
    for (const TargetLocation& t : targets)
      if (out.target_reaching_functions.insert(t.function).second)
        work.push_back(t.function);
    while (!work.empty()) {
      std::string cur = work.back();
      work.pop_back();
      auto it = icg.callers_of.find(cur);
      if (it == icg.callers_of.end()) continue;
      for (const CallSite& s : it->second)
        if (out.target_reaching_functions.insert(s.caller).second)
          work.push_back(s.caller);
    }
  }

  for (size_t fi = 0; fi < base.functions.size(); ++fi)
    if (required[fi])
      out.required_functions.insert(base.functions[fi].name);

  uint32_t next_marker_id = max_synthetic_id(base);
  for (size_t fi = 0; fi < base.functions.size(); ++fi) {
    Function& f = out.program.functions[fi];
    for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
      uint32_t g = pass.lay.gbid(static_cast<int>(fi), static_cast<int>(bi));
      if (pass.rel[g] || pass.post[g])
        out.relevant_blocks.insert({f.name, f.blocks[bi].label});

      int e = -1;
      Pass::Mark m = pass.classify(g, required, &e);
      if (m == Pass::Mark::None) continue;
      if (m == Pass::Mark::AfterEvent && e < 0)
        throw std::logic_error("relevant block without a relevance point: " +
                               f.name + ":" + f.blocks[bi].label);
      size_t at = m == Pass::Mark::Trailing
                      ? f.blocks[bi].instructions.size() - 1
                      : static_cast<size_t>(e) + 1;
      Instruction marker;
      marker.id = ++next_marker_id;
      marker.body = MarkerIns{};
      f.blocks[bi].instructions.insert(
          f.blocks[bi].instructions.begin() + static_cast<long>(at), marker);
    }
  }
  return out;
}

}  // namespace tir
