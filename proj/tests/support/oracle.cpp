#include "oracle.hpp"

#include <deque>
#include <map>
#include <vector>

namespace tir::testing {

namespace {

bool same_type(const Type& a, const Type& b);

bool same_signature(const Signature& a, const Signature& b) {
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i)
    if (!same_type(a.params[i], b.params[i])) return false;
  if (a.ret.has_value() != b.ret.has_value()) return false;
  return !a.ret || same_type(*a.ret, *b.ret);
}

bool same_type(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::Int) return true;
  return same_signature(*a.sig, *b.sig);
}

struct Supergraph {
  const Program& p;
  bool matching;

  std::map<std::string, int> fn_idx;
  // point id = base[fn][blk] + ii
  std::vector<std::vector<int>> base;
  std::vector<std::map<std::string, int>> blk_idx;
  int n_points = 0;

  std::vector<std::vector<int>> rev;  // reverse adjacency
  std::vector<int> goals;

  explicit Supergraph(const Program& prog, const TargetSpec& spec, bool m)
      : p(prog), matching(m) {
    for (size_t fi = 0; fi < p.functions.size(); ++fi) {
      fn_idx[p.functions[fi].name] = static_cast<int>(fi);
      std::map<std::string, int> bl;
      std::vector<int> bb;
      for (size_t bi = 0; bi < p.functions[fi].blocks.size(); ++bi) {
        bl[p.functions[fi].blocks[bi].label] = static_cast<int>(bi);
        bb.push_back(n_points);
        n_points +=
            static_cast<int>(p.functions[fi].blocks[bi].instructions.size());
      }
      blk_idx.push_back(std::move(bl));
      base.push_back(std::move(bb));
    }
    rev.resize(static_cast<size_t>(n_points));

    auto add_edge = [&](int from, int to) { rev[size_t(to)].push_back(from); };
    auto point = [&](int fi, int bi, int ii) { return base[size_t(fi)][size_t(bi)] + ii; };

    auto candidates = [&](const Instruction& ins) {
      std::vector<int> out;
      if (auto* cd = ins.as<CallDirectIns>()) {
        out.push_back(fn_idx.at(cd->callee));
      } else if (auto* ci = ins.as<CallIndirectIns>()) {
        if (matching)
          for (size_t fi = 0; fi < p.functions.size(); ++fi)
            if (same_signature(p.functions[fi].signature(), ci->sig))
              out.push_back(static_cast<int>(fi));
      }
      return out;
    };

    // Call sites per function, for return edges.
    std::vector<std::vector<int>> continuations(p.functions.size());
    for (size_t fi = 0; fi < p.functions.size(); ++fi) {
      const Function& f = p.functions[fi];
      for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
        const auto& ins = f.blocks[bi].instructions;
        for (size_t ii = 0; ii < ins.size(); ++ii)
          if (ins[ii].is_call())
            for (int callee : candidates(ins[ii]))
              continuations[size_t(callee)].push_back(
                  point(int(fi), int(bi), int(ii) + 1));
      }
    }

    for (size_t fi = 0; fi < p.functions.size(); ++fi) {
      const Function& f = p.functions[fi];
      for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
        const auto& ins = f.blocks[bi].instructions;
        for (size_t ii = 0; ii < ins.size(); ++ii) {
          int here = point(int(fi), int(bi), int(ii));
          const Instruction& i = ins[ii];
          if (auto* t = i.as<TargetIns>()) {
            if (spec.target_ids.count(t->id)) goals.push_back(here);
          }
          if (auto* br = i.as<BrIns>()) {
            add_edge(here, point(int(fi), blk_idx[fi].at(br->if_true), 0));
            add_edge(here, point(int(fi), blk_idx[fi].at(br->if_false), 0));
            continue;
          }
          if (auto* j = i.as<JmpIns>()) {
            add_edge(here, point(int(fi), blk_idx[fi].at(j->label), 0));
            continue;
          }
          if (i.as<RetIns>()) {
            for (int cont : continuations[fi]) add_edge(here, cont);
            continue;
          }
          // Everything else falls through (calls are assumed to return;
          // bug and exit are treated as falling through, mirroring the
          // block-granular view of the static analysis).
          if (ii + 1 < ins.size()) add_edge(here, point(int(fi), int(bi), int(ii) + 1));
          for (int callee : candidates(i))
            add_edge(here, base[size_t(callee)][0]);
        }
      }
    }
  }

  std::vector<bool> reaches_goal() const {
    std::vector<bool> seen(static_cast<size_t>(n_points), false);
    std::deque<int> work;
    for (int g : goals) {
      if (!seen[size_t(g)]) {
        seen[size_t(g)] = true;
        work.push_back(g);
      }
    }
    while (!work.empty()) {
      int cur = work.front();
      work.pop_front();
      for (int pr : rev[size_t(cur)])
        if (!seen[size_t(pr)]) {
          seen[size_t(pr)] = true;
          work.push_back(pr);
        }
    }
    return seen;
  }
};

}  // namespace

std::set<BlockRef> oracle_relevant_blocks(const Program& p,
                                          const TargetSpec& spec,
                                          bool signature_matching) {
  Supergraph sg(p, spec, signature_matching);
  std::vector<bool> hit = sg.reaches_goal();

  std::set<BlockRef> out;
  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    const Function& f = p.functions[fi];
    for (size_t bi = 0; bi < f.blocks.size(); ++bi)
      if (hit[size_t(sg.base[fi][bi])])
        out.insert({f.name, f.blocks[bi].label});
  }

  // Post-target region: intra-function forward closure from target blocks.
  for (const Function& f : p.functions) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const BasicBlock& b : f.blocks) {
      const Instruction& term = b.instructions.back();
      if (auto* br = term.as<BrIns>()) {
        succ[b.label] = {br->if_true, br->if_false};
      } else if (auto* j = term.as<JmpIns>()) {
        succ[b.label] = {j->label};
      }
    }
    std::vector<std::string> work;
    std::set<std::string> seen;
    for (const BasicBlock& b : f.blocks)
      for (const Instruction& i : b.instructions)
        if (auto* t = i.as<TargetIns>())
          if (spec.target_ids.count(t->id) && seen.insert(b.label).second)
            work.push_back(b.label);
    while (!work.empty()) {
      std::string cur = work.back();
      work.pop_back();
      out.insert({f.name, cur});
      for (const std::string& s : succ[cur])
        if (seen.insert(s).second) work.push_back(s);
    }
  }
  return out;
}

bool oracle_path_exists(const Function& f, const std::string& from,
                        const std::string& to) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const BasicBlock& b : f.blocks) {
    const Instruction& term = b.instructions.back();
    if (auto* br = term.as<BrIns>())
      succ[b.label] = {br->if_true, br->if_false};
    else if (auto* j = term.as<JmpIns>())
      succ[b.label] = {j->label};
  }
  std::set<std::string> seen{from};
  std::vector<std::string> work{from};
  while (!work.empty()) {
    std::string cur = work.back();
    work.pop_back();
    if (cur == to) return true;
    for (const std::string& s : succ[cur])
      if (seen.insert(s).second) work.push_back(s);
  }
  return false;
}

}  // namespace tir::testing
