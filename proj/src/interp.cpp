#include "tir/interp.hpp"

#include <algorithm>
#include <map>

namespace tir {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::NormalReturn: return "normal_return";
    case Termination::PrunedExit: return "pruned_exit";
    case Termination::BugTriggered: return "bug_triggered";
    case Termination::StepBudgetExhausted: return "step_budget_exhausted";
  }
  return "?";
}

namespace {

enum class Op : uint8_t {
  Const, Read, Bin, FnAddr, CallD, CallI, Br, Jmp, Ret, Exit, Target, Bug
};

struct CIns {
  Op op;
  BinOp bop = BinOp::Add;
  int32_t a = -1, b = -1, c = -1;  // slots / block indices / function index
  int64_t imm = 0;
  uint32_t id = 0;
  int32_t args_begin = 0, args_end = 0;  // into the argument slot pool
  int32_t sig_key = -1;                  // interned signature, for CallI
};

struct Val {
  int64_t num = 0;
  int32_t fn = -1;  // >= 0 when the value holds a function address
};

int64_t wrap_add(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
int64_t wrap_sub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
int64_t wrap_mul(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}
// Division by zero yields 0 so that faults come only from `bug` instructions.
int64_t safe_div(int64_t a, int64_t b) {
  if (b == 0) return 0;
  if (a == INT64_MIN && b == -1) return INT64_MIN;
  return a / b;
}

}  // namespace

struct Interpreter::Impl {
  const Program& prog;
  Layout lay;
  std::vector<TargetInfo> target_table;

  struct CFun {
    std::vector<std::vector<CIns>> blocks;
    int32_t n_slots = 0;
    int32_t n_params = 0;
    int32_t sig_key = -1;
  };
  std::vector<CFun> fns;
  std::vector<int32_t> arg_pool;
  int32_t entry_fn = -1;

  // Reused per-run scratch.
  struct Frame {
    int32_t fn, blk, ip;
    int32_t slot_base;
    int32_t ret_slot;        // slot in the caller, -1 if unused
    uint32_t created_by;     // call instruction id in the caller
  };
  std::vector<Frame> frames;
  std::vector<Val> slots;
  std::vector<uint32_t> block_seq;
  std::vector<uint8_t> covered;

  explicit Impl(const Program& p) : prog(p), lay(Layout::build(p)) {
    std::map<std::string, int32_t> sig_keys;
    auto intern = [&](const Signature& s) {
      std::string k = to_string(s);
      auto [it, fresh] = sig_keys.emplace(k, static_cast<int32_t>(sig_keys.size()));
      (void)fresh;
      return it->second;
    };

    fns.resize(p.functions.size());
    for (size_t fi = 0; fi < p.functions.size(); ++fi)
      fns[fi].sig_key = intern(p.functions[fi].signature());

    for (size_t fi = 0; fi < p.functions.size(); ++fi) {
      const Function& f = p.functions[fi];
      CFun& cf = fns[fi];
      std::map<std::string, int32_t> slot_of;
      for (const Param& prm : f.params)
        slot_of.emplace(prm.name, static_cast<int32_t>(slot_of.size()));
      cf.n_params = static_cast<int32_t>(f.params.size());
      auto slot = [&](const std::string& name) {
        auto [it, fresh] =
            slot_of.emplace(name, static_cast<int32_t>(slot_of.size()));
        (void)fresh;
        return it->second;
      };

      cf.blocks.resize(f.blocks.size());
      for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
        for (const Instruction& ins : f.blocks[bi].instructions) {
          if (ins.is_marker()) continue;  // inert and free at runtime
          CIns ci;
          ci.id = ins.id;
          if (auto* c = ins.as<ConstIns>()) {
            ci.op = Op::Const;
            ci.a = slot(c->dst);
            ci.imm = c->value;
          } else if (auto* r = ins.as<ReadInputIns>()) {
            ci.op = Op::Read;
            ci.a = slot(r->dst);
          } else if (auto* bo = ins.as<BinOpIns>()) {
            ci.op = Op::Bin;
            ci.bop = bo->op;
            ci.b = slot(bo->lhs);
            ci.c = slot(bo->rhs);
            ci.a = slot(bo->dst);
          } else if (auto* fa = ins.as<FnAddrIns>()) {
            ci.op = Op::FnAddr;
            ci.a = slot(fa->dst);
            ci.b = lay.fn_index.at(fa->fn);
          } else if (auto* cd = ins.as<CallDirectIns>()) {
            ci.op = Op::CallD;
            ci.b = lay.fn_index.at(cd->callee);
            ci.args_begin = static_cast<int32_t>(arg_pool.size());
            for (const std::string& a : cd->args) arg_pool.push_back(slot(a));
            ci.args_end = static_cast<int32_t>(arg_pool.size());
            ci.a = cd->dst.empty() ? -1 : slot(cd->dst);
          } else if (auto* cc = ins.as<CallIndirectIns>()) {
            ci.op = Op::CallI;
            ci.b = slot(cc->ptr);
            ci.sig_key = intern(cc->sig);
            ci.args_begin = static_cast<int32_t>(arg_pool.size());
            for (const std::string& a : cc->args) arg_pool.push_back(slot(a));
            ci.args_end = static_cast<int32_t>(arg_pool.size());
            ci.a = cc->dst.empty() ? -1 : slot(cc->dst);
          } else if (auto* br = ins.as<BrIns>()) {
            ci.op = Op::Br;
            ci.a = slot(br->cond);
            ci.b = lay.block_index[fi].at(br->if_true);
            ci.c = lay.block_index[fi].at(br->if_false);
          } else if (auto* j = ins.as<JmpIns>()) {
            ci.op = Op::Jmp;
            ci.b = lay.block_index[fi].at(j->label);
          } else if (auto* rt = ins.as<RetIns>()) {
            ci.op = Op::Ret;
            ci.a = rt->value ? slot(*rt->value) : -1;
          } else if (auto* ex = ins.as<ExitIns>()) {
            ci.op = Op::Exit;
            ci.imm = ex->code;
            ci.a = ex->pruner_inserted ? 1 : 0;
          } else if (auto* tg = ins.as<TargetIns>()) {
            ci.op = Op::Target;
            ci.a = static_cast<int32_t>(target_table.size());
            target_table.push_back(
                TargetInfo{tg->id, f.name, f.blocks[bi].label, ins.id});
          } else if (auto* bg = ins.as<BugIns>()) {
            ci.op = Op::Bug;
            ci.imm = 0;
            ci.a = -1;
            ci.b = -1;
            // bug id kept on the side, indexed by instruction id
            bug_ids[ins.id] = bg->id;
          }
          cf.blocks[bi].push_back(ci);
        }
      }
      cf.n_slots = static_cast<int32_t>(slot_of.size());
    }
    entry_fn = lay.fn_index.at(p.entry);
  }

  std::map<uint32_t, std::string> bug_ids;

  ExecutionTrace run(std::span<const uint8_t> input, const InterpOptions& opt) {
    ExecutionTrace tr;
    frames.clear();
    slots.clear();
    block_seq.clear();
    covered.assign(lay.n_blocks, 0);

    size_t in_pos = 0;
    uint64_t steps = 0;

    auto enter_block = [&](uint32_t gbid) {
      block_seq.push_back(gbid);
      covered[gbid] = 1;
    };

    auto push_frame = [&](int32_t fn, int32_t ret_slot, uint32_t by) {
      frames.push_back(Frame{fn, 0, 0, static_cast<int32_t>(slots.size()),
                             ret_slot, by});
      slots.resize(slots.size() + static_cast<size_t>(fns[fn].n_slots));
      enter_block(lay.gbid(fn, 0));
    };

    push_frame(entry_fn, -1, 0);

    auto finish = [&](Termination t) {
      tr.termination = t;
      tr.steps = steps;
      tr.blocks_covered.clear();
      for (uint32_t g = 0; g < lay.n_blocks; ++g)
        if (covered[g]) tr.blocks_covered.push_back(g);
      // Edge hit counts from the entered-block sequence.
      std::vector<uint64_t> keys;
      keys.reserve(block_seq.size());
      for (size_t i = 1; i < block_seq.size(); ++i)
        keys.push_back((static_cast<uint64_t>(block_seq[i - 1]) << 32) |
                       block_seq[i]);
      std::sort(keys.begin(), keys.end());
      for (size_t i = 0; i < keys.size();) {
        size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        tr.edges.push_back({keys[i], static_cast<uint32_t>(j - i)});
        i = j;
      }
      return tr;
    };

    auto capture_stack = [&](uint32_t fault_ins) {
      tr.bug_stack.push_back(
          StackFrameRef{prog.functions[frames.back().fn].name, fault_ins});
      for (size_t k = frames.size(); k-- > 1;)
        tr.bug_stack.push_back(StackFrameRef{
            prog.functions[frames[k - 1].fn].name, frames[k].created_by});
    };

    while (true) {
      Frame& fr = frames.back();
      const std::vector<CIns>& blk = fns[fr.fn].blocks[fr.blk];
      if (fr.ip >= static_cast<int32_t>(blk.size()))
        throw EvalError("fell off the end of a basic block");
      const CIns& ins = blk[fr.ip];

      if (steps >= opt.step_budget) return finish(Termination::StepBudgetExhausted);
      ++steps;
      if (opt.record_instruction_trace) tr.instr_trace.push_back(ins.id);

      Val* base = slots.data() + fr.slot_base;
      switch (ins.op) {
        case Op::Const:
          base[ins.a] = Val{ins.imm, -1};
          ++fr.ip;
          break;
        case Op::Read:
          base[ins.a] =
              Val{in_pos < input.size() ? input[in_pos] : 0, -1};
          if (in_pos < input.size()) ++in_pos;
          ++fr.ip;
          break;
        case Op::Bin: {
          int64_t l = base[ins.b].num, r = base[ins.c].num;
          int64_t v = 0;
          switch (ins.bop) {
            case BinOp::Add: v = wrap_add(l, r); break;
            case BinOp::Sub: v = wrap_sub(l, r); break;
            case BinOp::Mul: v = wrap_mul(l, r); break;
            case BinOp::Div: v = safe_div(l, r); break;
            case BinOp::Eq: v = l == r; break;
            case BinOp::Ne: v = l != r; break;
            case BinOp::Lt: v = l < r; break;
            case BinOp::Gt: v = l > r; break;
            case BinOp::And: v = l & r; break;
            case BinOp::Or: v = l | r; break;
          }
          base[ins.a] = Val{v, -1};
          ++fr.ip;
          break;
        }
        case Op::FnAddr:
          base[ins.a] = Val{0, ins.b};
          ++fr.ip;
          break;
        case Op::CallD:
        case Op::CallI: {
          int32_t callee;
          if (ins.op == Op::CallD) {
            callee = ins.b;
          } else {
            const Val& pv = base[ins.b];
            if (pv.fn < 0)
              throw EvalError("indirect call through a non-function value");
            if (fns[pv.fn].sig_key != ins.sig_key)
              throw EvalError("indirect call signature mismatch");
            callee = pv.fn;
            tr.indirect_calls.push_back({ins.id, callee});
          }
          if (frames.size() >= opt.max_stack_depth)
            return finish(Termination::StepBudgetExhausted);
          // Copy arguments before the frame push may reallocate the arena.
          Val args_buf[16];
          std::vector<Val> args_big;
          int32_t nargs = ins.args_end - ins.args_begin;
          Val* args = args_buf;
          if (nargs > 16) {
            args_big.resize(static_cast<size_t>(nargs));
            args = args_big.data();
          }
          for (int32_t i = 0; i < nargs; ++i)
            args[i] = base[arg_pool[ins.args_begin + i]];
          ++fr.ip;  // resume after the call on return
          push_frame(callee, ins.a, ins.id);
          Frame& nf = frames.back();
          Val* nbase = slots.data() + nf.slot_base;
          for (int32_t i = 0; i < nargs; ++i) nbase[i] = args[i];
          break;
        }
        case Op::Br: {
          int32_t nxt = base[ins.a].num != 0 ? ins.b : ins.c;
          fr.blk = nxt;
          fr.ip = 0;
          enter_block(lay.gbid(fr.fn, nxt));
          break;
        }
        case Op::Jmp:
          fr.blk = ins.b;
          fr.ip = 0;
          enter_block(lay.gbid(fr.fn, ins.b));
          break;
        case Op::Ret: {
          Val rv = ins.a >= 0 ? base[ins.a] : Val{};
          int32_t ret_slot = fr.ret_slot;
          slots.resize(static_cast<size_t>(fr.slot_base));
          frames.pop_back();
          if (frames.empty()) {
            tr.exit_code = 0;
            return finish(Termination::NormalReturn);
          }
          if (ret_slot >= 0)
            slots[static_cast<size_t>(frames.back().slot_base) + ret_slot] = rv;
          break;
        }
        case Op::Exit:
          tr.exit_code = ins.imm;
          return finish(ins.a ? Termination::PrunedExit
                              : Termination::NormalReturn);
        case Op::Target:
          tr.targets_hit.push_back(ins.a);
          ++fr.ip;
          break;
        case Op::Bug:
          tr.bug_id = bug_ids.at(ins.id);
          capture_stack(ins.id);
          return finish(Termination::BugTriggered);
      }
    }
  }
};

Interpreter::Interpreter(const Program& p) : impl_(new Impl(p)) {}
Interpreter::~Interpreter() { delete impl_; }

ExecutionTrace Interpreter::run(std::span<const uint8_t> input,
                                const InterpOptions& opt) {
  return impl_->run(input, opt);
}

const Layout& Interpreter::layout() const { return impl_->lay; }
const std::vector<TargetInfo>& Interpreter::targets() const {
  return impl_->target_table;
}

ExecutionTrace interpret(const Program& p, std::span<const uint8_t> input,
                         const InterpOptions& opt) {
  Interpreter eng(p);
  return eng.run(input, opt);
}

}  // namespace tir
