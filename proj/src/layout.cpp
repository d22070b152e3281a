#include "tir/layout.hpp"

#include <algorithm>

namespace tir {

Layout Layout::build(const Program& p) {
  Layout l;
  l.prog = &p;
  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    const Function& f = p.functions[fi];
    l.fn_index[f.name] = static_cast<int>(fi);
    l.block_base.push_back(l.n_blocks);
    std::map<std::string, int> bl;
    for (size_t bi = 0; bi < f.blocks.size(); ++bi)
      bl[f.blocks[bi].label] = static_cast<int>(bi);
    l.block_index.push_back(std::move(bl));
    l.n_blocks += static_cast<uint32_t>(f.blocks.size());
  }

  l.succ.resize(l.n_blocks);
  l.pred.resize(l.n_blocks);
  l.ends_in_ret.resize(l.n_blocks, false);
  for (size_t fi = 0; fi < p.functions.size(); ++fi) {
    const Function& f = p.functions[fi];
    for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
      uint32_t g = l.gbid(static_cast<int>(fi), static_cast<int>(bi));
      const Instruction& term = f.blocks[bi].instructions.back();
      auto link = [&](const std::string& label) {
        uint32_t tg = l.gbid(static_cast<int>(fi),
                             l.block_index[fi].at(label));
        l.succ[g].push_back(tg);
        l.pred[tg].push_back(g);
      };
      if (auto* br = term.as<BrIns>()) {
        link(br->if_true);
        if (br->if_false != br->if_true) link(br->if_false);
      } else if (auto* j = term.as<JmpIns>()) {
        link(j->label);
      } else if (term.as<RetIns>()) {
        l.ends_in_ret[g] = true;
      }
      // exit: no successors
    }
  }
  for (auto& v : l.pred) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return l;
}

int Layout::fn_of_block(uint32_t gbid) const {
  int lo = 0, hi = static_cast<int>(block_base.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (block_base[mid] <= gbid)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

int Layout::local_block(uint32_t g) const {
  return static_cast<int>(g - block_base[fn_of_block(g)]);
}

const BasicBlock& Layout::block(uint32_t g) const {
  int fi = fn_of_block(g);
  return prog->functions[fi].blocks[g - block_base[fi]];
}

std::string Layout::block_name(uint32_t g) const {
  int fi = fn_of_block(g);
  return prog->functions[fi].name + ":" + block(g).label;
}

}  // namespace tir
