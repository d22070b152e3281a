#include "tir/corpus.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "tir/fuzz.hpp"
#include "tir/interp.hpp"
#include "tir/text.hpp"

namespace tir {

namespace {

// Binary fan-out call chains used as input-independent heavy code. A call to
// <prefix>1 burns a few hundred steps, which is what makes un-pruned
// wandering expensive in the scenarios below.
std::string noise_chain(const std::string& prefix) {
  std::string out;
  for (int i = 1; i <= 4; ++i) {
    std::string me = prefix + std::to_string(i);
    std::string next = prefix + std::to_string(i + 1);
    out += "\nfunc " + me + "() -> int {\nn" + std::to_string(i) + ":\n";
    out += "  a = call " + next + "()\n";
    out += "  b = call " + next + "()\n";
    out += "  s = add a, b\n  ret s\n}\n";
  }
  out += "\nfunc " + prefix + "5() -> int {\nn5:\n  v = const 3\n";
  out += "  w = mul v, v\n  ret w\n}\n";
  return out;
}

CorpusProgram make_fig1() {
  CorpusProgram c;
  c.name = "fig1-netcdf-like";
  c.notes =
      "Command dispatcher with one target-relevant subcommand and one heavy "
      "irrelevant subcommand; the bug sits past the target.";
  c.source = R"(entry main

func main() -> int {
b0:
  cmd = read_input
  k_dump = const 127
  is_dump = eq cmd, k_dump
  br is_dump, b_dump, b_x
b_dump:
  r = call do_dump()
  jmp b_exit
b_x:
  r2 = call do_dumpx()
  jmp b_exit
b_exit:
  z = const 0
  ret z
}

func do_dump() -> int {
bd0:
  m = read_input
  k_magic = const 255
  ok = eq m, k_magic
  br ok, bd_t, bd_err
bd_t:
  target t1
  jmp bd_post
bd_post:
  x = read_input
  k_one = const 1
  bad = eq x, k_one
  br bad, bd_bug, bd_ret
bd_bug:
  bug fig1_corruption
  jmp bd_ret
bd_err:
  e = const 0
  ret e
bd_ret:
  one = const 1
  ret one
}

func do_dumpx() -> int {
bx0:
  c = read_input
  k_zero = const 0
  keep = ne c, k_zero
  br keep, bx_work, bx_done
bx_work:
  d = read_input
  acc = add c, d
  n0 = call xnoise1()
  jmp bx0
bx_done:
  fin = call xnoise1()
  ret fin
}
)" + noise_chain("xnoise");
  c.targets.target_ids = {"t1"};
  c.witness = {127, 255};
  c.planted_bugs = {{"fig1_corruption", "post-target", {127, 255, 1}}};
  return c;
}

CorpusProgram make_fig2() {
  CorpusProgram c;
  c.name = "fig2-giflib-like";
  c.notes =
      "The target is reachable only through two indirect calls dispatched by "
      "signature; dropping signature matching prunes the whole path away.";
  c.source = R"(entry main

func main() -> int {
b0:
  h_rw = fnaddr open_rw
  h_ro = fnaddr open_ro
  sel = read_input
  k_sel = const 127
  pick = eq sel, k_sel
  br pick, b_rw, b_ro
b_rw:
  m1 = const 1
  r1 = icall [fn(int) -> int] h_rw(m1)
  jmp b_done
b_ro:
  m2 = const 0
  r2 = icall [fn(int) -> int] h_ro(m2)
  jmp b_done
b_done:
  z = const 0
  ret z
}

func open_rw(mode: int) -> int {
o0:
  w = fnaddr write_gif
  cc = read_input
  k_mode = const 255
  ok = eq cc, k_mode
  br ok, o_go, o_skip
o_go:
  r = icall [fn() -> int] w()
  jmp o_end
o_skip:
  s0 = const 0
  ret s0
o_end:
  s1 = const 1
  ret s1
}

func open_ro(mode: int) -> int {
q0:
  c0 = read_input
  k_z = const 0
  some = ne c0, k_z
  br some, q1, q2
q1:
  t0 = add c0, mode
  jmp q2
q2:
  s2 = const 2
  ret s2
}

func write_gif() -> int {
w0:
  target t_leak
  jmp w1
w1:
  x = read_input
  k_zz = const 0
  leak = ne x, k_zz
  br leak, w_bug, w_ok
w_bug:
  bug fig2_leak
  jmp w_ok
w_ok:
  k = const 0
  ret k
}

func write_bmp() -> int {
v0:
  k2 = const 9
  ret k2
}
)";
  c.targets.target_ids = {"t_leak"};
  c.witness = {127, 255};
  c.planted_bugs = {{"fig2_leak", "indirect", {127, 255, 1}}};
  return c;
}

CorpusProgram make_deep_chain() {
  CorpusProgram c;
  c.name = "deep-call-chain";
  c.notes =
      "Four nested calls guard the target; every level has a heavy irrelevant "
      "sibling taken by small input bytes.";
  std::string lvl = R"(
func lvlN() -> int {
lNa:
  gN = read_input
  kN = const 10
  goN = gt gN, kN
  br goN, lN_go, lN_noise
lN_go:
  rN = call NEXT()
  jmp lN_end
lN_noise:
  qN = call dnoise1()
  jmp lN_end
lN_end:
  zN = const 0
  ret zN
}
)";
  auto instantiate = [&](int n, const std::string& next) {
    std::string s = lvl;
    std::string from = "N";
    std::string to = std::to_string(n);
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
      // Only replace bare N markers (lvlN, lNa, gN, ...), not NEXT.
      if (s.compare(pos, 4, "NEXT") == 0) {
        pos += 4;
        continue;
      }
      s.replace(pos, 1, to);
      pos += to.size();
    }
    pos = s.find("NEXT");
    s.replace(pos, 4, next);
    return s;
  };
  c.source = R"(entry main

func main() -> int {
m0:
  g0 = read_input
  k0 = const 10
  go0 = gt g0, k0
  br go0, m_go, m_noise
m_go:
  r0 = call lvl1()
  jmp m_end
m_noise:
  q0 = call dnoise1()
  jmp m_end
m_end:
  z = const 0
  ret z
}
)" + instantiate(1, "lvl2") +
             instantiate(2, "lvl3") + R"(
func lvl3() -> int {
l3a:
  g3 = read_input
  k3 = const 10
  go3 = gt g3, k3
  br go3, l3_t, l3_noise
l3_t:
  target t_deep
  jmp l3_post
l3_post:
  pb = read_input
  kb = const 255
  trig = eq pb, kb
  br trig, l3_bug, l3_end
l3_bug:
  bug deep_overflow
  jmp l3_end
l3_noise:
  q3 = call dnoise1()
  jmp l3_end
l3_end:
  z3 = const 0
  ret z3
}
)" + noise_chain("dnoise");
  c.targets.target_ids = {"t_deep"};
  c.witness = {127, 127, 127, 127};
  c.planted_bugs = {{"deep_overflow", "direct", {127, 127, 127, 127, 255}}};
  return c;
}

CorpusProgram make_post_target() {
  CorpusProgram c;
  c.name = "post-target-bug";
  c.notes =
      "The target sits in main; the bug lives past it, in a helper reachable "
      "from two distinct call sites (same bug, two stacks).";
  c.source = R"(entry main

func main() -> int {
p0:
  a = read_input
  k_t = const 127
  ok = eq a, k_t
  br ok, p_t, p_noise
p_noise:
  nn = call pnoise1()
  jmp p_end
p_end:
  z0 = const 0
  ret z0
p_t:
  target t_post
  jmp p1
p1:
  b = read_input
  k_f = const 255
  first = eq b, k_f
  br first, p_go1, p_alt
p_alt:
  k_s = const 1
  second = eq b, k_s
  br second, p_go2, p_ret
p_go1:
  r1 = call burst(b)
  jmp p_ret
p_go2:
  r2 = call burst(b)
  jmp p_ret
p_ret:
  z1 = const 0
  ret z1
}

func burst(v: int) -> int {
g0:
  k_v = const 0
  boom = ne v, k_v
  br boom, g_bug, g_ok
g_bug:
  bug post_expand
  jmp g_ok
g_ok:
  k = const 0
  ret k
}
)" + noise_chain("pnoise");
  c.targets.target_ids = {"t_post"};
  c.witness = {127};
  c.planted_bugs = {{"post_expand", "post-target", {127, 255}}};
  return c;
}

CorpusProgram make_collision() {
  CorpusProgram c;
  c.name = "signature-collision-heavy";
  c.notes =
      "Four handlers share one signature; every dispatch site conservatively "
      "keeps all of them as candidates, only one contains the target.";
  c.source = R"(entry main

func main() -> int {
s0:
  h_a = fnaddr proc_a
  h_b = fnaddr proc_b
  h_c = fnaddr proc_c
  h_d = fnaddr proc_d
  sel = read_input
  v = read_input
  k_a = const 1
  is_a = eq sel, k_a
  br is_a, s_a, s1
s_a:
  r0 = icall [fn(int) -> int] h_a(v)
  jmp s_end
s1:
  k_b = const 2
  is_b = eq sel, k_b
  br is_b, s_b, s2
s_b:
  r1 = icall [fn(int) -> int] h_b(v)
  jmp s_end
s2:
  k_c = const 3
  is_c = eq sel, k_c
  br is_c, s_c, s_d
s_c:
  r2 = icall [fn(int) -> int] h_c(v)
  jmp s_end
s_d:
  r3 = icall [fn(int) -> int] h_d(v)
  jmp s_end
s_end:
  z = const 0
  ret z
}

func proc_a(x: int) -> int {
pa0:
  ya = mul x, x
  ret ya
}

func proc_b(x: int) -> int {
pb0:
  yb = add x, x
  ret yb
}

func proc_c(x: int) -> int {
pc0:
  k_w = const 255
  want = eq x, k_w
  br want, pc_t, pc_skip
pc_t:
  target t_sig
  jmp pc_post
pc_post:
  y = read_input
  k_y = const 127
  tb = eq y, k_y
  br tb, pc_bug, pc_done
pc_bug:
  bug collision_bug
  jmp pc_done
pc_skip:
  q = const 0
  ret q
pc_done:
  w = const 1
  ret w
}

func proc_d(x: int) -> int {
pd0:
  yd = sub x, x
  ret yd
}
)";
  c.targets.target_ids = {"t_sig"};
  c.witness = {3, 255};
  c.planted_bugs = {{"collision_bug", "indirect", {3, 255, 127}}};
  return c;
}

CorpusProgram make_multi_target() {
  CorpusProgram c;
  c.name = "multi-target";
  c.notes = "Two targets in different callees; relevance is their union.";
  c.source = R"(entry main

func main() -> int {
u0:
  s = read_input
  k_half = const 128
  le = lt s, k_half
  br le, u_a, u_b
u_a:
  ra = call alpha()
  jmp u_end
u_b:
  rb = call beta()
  jmp u_end
u_end:
  z = const 0
  ret z
}

func alpha() -> int {
a0:
  target t_a
  jmp a1
a1:
  za = const 1
  ret za
}

func beta() -> int {
b0:
  target t_b
  jmp b1
b1:
  x = read_input
  k_seven = const 7
  bb = eq x, k_seven
  br bb, b_bug, b_done
b_bug:
  bug multi_path_bug
  jmp b_done
b_done:
  zb = const 2
  ret zb
}
)";
  c.targets.target_ids = {"t_a", "t_b"};
  c.witness = {0};
  c.planted_bugs = {{"multi_path_bug", "direct", {200, 7}}};
  return c;
}

}  // namespace

const std::vector<CorpusProgram>& scenario_corpus() {
  static const std::vector<CorpusProgram> all = {
      make_fig1(),        make_fig2(),     make_deep_chain(),
      make_post_target(), make_collision(), make_multi_target()};
  return all;
}

const CorpusProgram* find_scenario(const std::string& name) {
  for (const CorpusProgram& c : scenario_corpus())
    if (c.name == name) return &c;
  return nullptr;
}

// ---- Random program generator ----------------------------------------------

namespace {

struct GenState {
  Rng rng;
  const GeneratorParams& p;
  Program prog;
  // Per-function defined int values usable as operands, in textual order.
  std::vector<std::string> int_vals;
  int val_counter = 0;

  explicit GenState(uint64_t seed, const GeneratorParams& params)
      : rng(seed), p(params) {}

  std::string fresh() { return "v" + std::to_string(val_counter++); }

  static const std::vector<int64_t>& const_pool() {
    static const std::vector<int64_t> k = {0, 1, 2, 127, 255};
    return k;
  }

  Instruction ins(InsBody body) {
    Instruction i;
    i.body = std::move(body);
    return i;
  }

  // Emits a const definition and returns its name.
  std::string emit_const(BasicBlock& b) {
    std::string d = fresh();
    b.instructions.push_back(
        ins(ConstIns{d, const_pool()[rng.below(const_pool().size())]}));
    int_vals.push_back(d);
    return d;
  }

  void emit_filler(BasicBlock& b) {
    uint64_t n = rng.below(3);
    for (uint64_t i = 0; i < n; ++i) {
      switch (rng.below(3)) {
        case 0:
          emit_const(b);
          break;
        case 1: {
          std::string d = fresh();
          b.instructions.push_back(ins(ReadInputIns{d}));
          int_vals.push_back(d);
          break;
        }
        default: {
          if (int_vals.size() < 2) {
            emit_const(b);
            break;
          }
          std::string l = int_vals[rng.below(int_vals.size())];
          std::string r = int_vals[rng.below(int_vals.size())];
          static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul,
                                      BinOp::Div, BinOp::And, BinOp::Or};
          std::string d = fresh();
          b.instructions.push_back(ins(BinOpIns{d, ops[rng.below(6)], l, r}));
          int_vals.push_back(d);
          break;
        }
      }
    }
  }

  // Reads a byte and compares it against a pool constant; returns the
  // condition value name.
  std::string emit_input_cond(BasicBlock& b) {
    std::string c = fresh();
    b.instructions.push_back(ins(ReadInputIns{c}));
    int_vals.push_back(c);
    std::string d = fresh();
    static const BinOp cmps[] = {BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Gt};
    std::string k = fresh();
    b.instructions.push_back(
        ins(ConstIns{k, const_pool()[rng.below(const_pool().size())]}));
    int_vals.push_back(k);
    b.instructions.push_back(ins(BinOpIns{d, cmps[rng.below(4)], c, k}));
    int_vals.push_back(d);
    return d;
  }

  void emit_call(BasicBlock& b, int callee_idx, bool indirect) {
    const Function& callee = prog.functions[static_cast<size_t>(callee_idx)];
    std::vector<std::string> args;
    for (size_t i = 0; i < callee.params.size(); ++i) args.push_back(emit_const(b));
    std::string dst = fresh();
    if (indirect) {
      std::string ptr = fresh();
      b.instructions.push_back(ins(FnAddrIns{ptr, callee.name}));
      b.instructions.push_back(
          ins(CallIndirectIns{dst, callee.signature(), ptr, args}));
    } else {
      b.instructions.push_back(ins(CallDirectIns{dst, callee.name, args}));
    }
    int_vals.push_back(dst);
  }
};

Program generate_once(uint64_t seed, const GeneratorParams& p) {
  GenState st(seed, p);
  int nf = p.functions;

  // Signature pool: arities 0..2, int params, int return. The collision
  // factor shrinks the pool, so more functions end up sharing a signature.
  int pool_size =
      std::max(1, (nf + p.signature_collision_factor - 1) /
                      std::max(1, p.signature_collision_factor));
  pool_size = std::min(pool_size, 3);
  std::vector<int> arities;
  for (int i = 0; i < pool_size; ++i) arities.push_back(i);

  for (int fi = 0; fi < nf; ++fi) {
    Function f;
    f.name = fi == 0 ? "main" : "f" + std::to_string(fi);
    f.ret = Type::integer();
    if (fi > 0) {
      int arity = arities[st.rng.below(arities.size())];
      for (int a = 0; a < arity; ++a)
        f.params.push_back(Param{"p" + std::to_string(a), Type::integer()});
    }
    int nb = 1 + static_cast<int>(st.rng.below(
                     static_cast<uint64_t>(p.max_blocks_per_fn)));
    for (int bi = 0; bi < nb; ++bi)
      f.blocks.push_back(BasicBlock{"b" + std::to_string(bi), {}});
    st.prog.functions.push_back(std::move(f));
  }
  st.prog.entry = "main";

  // Bodies. Values are function-local; reset naming per function.
  for (int fi = 0; fi < nf; ++fi) {
    Function& f = st.prog.functions[static_cast<size_t>(fi)];
    st.int_vals.clear();
    st.val_counter = 0;
    for (const Param& prm : f.params) st.int_vals.push_back(prm.name);
    int nb = static_cast<int>(f.blocks.size());
    for (int bi = 0; bi < nb; ++bi) {
      BasicBlock& b = f.blocks[static_cast<size_t>(bi)];
      st.emit_filler(b);
      bool is_last = bi + 1 == nb;
      if (is_last || st.rng.below(8) == 0) {
        std::string rv = st.emit_const(b);
        b.instructions.push_back(st.ins(RetIns{rv}));
      } else if (bi + 2 == nb || st.rng.below(4) == 0) {
        b.instructions.push_back(
            st.ins(JmpIns{"b" + std::to_string(bi + 1 +
                                               static_cast<int>(st.rng.below(
                                                   static_cast<uint64_t>(
                                                       nb - bi - 1))))}));
      } else if (p.back_edges && st.rng.below(6) == 0) {
        // Loop: keep looping while the next input byte is non-zero. Reads
        // past end-of-input yield 0, so every cycle drains input and exits.
        std::string c = st.fresh();
        b.instructions.push_back(st.ins(ReadInputIns{c}));
        st.int_vals.push_back(c);
        std::string k = st.fresh();
        b.instructions.push_back(st.ins(ConstIns{k, 0}));
        st.int_vals.push_back(k);
        std::string d = st.fresh();
        b.instructions.push_back(st.ins(BinOpIns{d, BinOp::Ne, c, k}));
        st.int_vals.push_back(d);
        std::string back =
            "b" + std::to_string(st.rng.below(static_cast<uint64_t>(bi + 1)));
        std::string fwd =
            "b" + std::to_string(bi + 1 + static_cast<int>(st.rng.below(
                                              static_cast<uint64_t>(nb - bi - 1))));
        b.instructions.push_back(st.ins(BrIns{d, back, fwd}));
      } else {
        std::string cond = st.emit_input_cond(b);
        int span = nb - bi - 1;
        std::string t1 =
            "b" + std::to_string(bi + 1 + static_cast<int>(st.rng.below(
                                              static_cast<uint64_t>(span))));
        std::string t2 =
            "b" + std::to_string(bi + 1 + static_cast<int>(st.rng.below(
                                              static_cast<uint64_t>(span))));
        b.instructions.push_back(st.ins(BrIns{cond, t1, t2}));
      }
    }
  }

  // Calls: every function gets at least one caller with a smaller index, so
  // the whole module is reachable over the call graph; extra calls only go
  // forward, keeping the call graph acyclic.
  for (int fi = 1; fi < nf; ++fi) {
    int caller = static_cast<int>(st.rng.below(static_cast<uint64_t>(fi)));
    Function& cf = st.prog.functions[static_cast<size_t>(caller)];
    // Rebuild the defined-values view for the caller.
    st.int_vals.clear();
    st.val_counter = 1000 + fi * 10;
    for (const Param& prm : cf.params) st.int_vals.push_back(prm.name);
    BasicBlock& blk = cf.blocks[st.rng.below(cf.blocks.size())];
    BasicBlock tmp{"", {}};
    bool indirect = st.rng.unit() < p.indirect_fraction;
    st.emit_call(tmp, fi, indirect);
    blk.instructions.insert(blk.instructions.end() - 1,
                            tmp.instructions.begin(), tmp.instructions.end());
  }

  // One target, placed in the last function so call-graph traversal matters.
  {
    Function& tf = st.prog.functions.back();
    BasicBlock& blk = tf.blocks[st.rng.below(tf.blocks.size())];
    Instruction t;
    t.body = TargetIns{"t1"};
    blk.instructions.insert(blk.instructions.end() - 1, t);
    if (p.plant_bug) {
      Instruction bug;
      bug.body = BugIns{"g1"};
      blk.instructions.insert(blk.instructions.end() - 1, bug);
    }
  }

  // Renumber ids deterministically via the printer/parser round trip.
  return parse_program(print_program(st.prog));
}

std::vector<std::vector<uint8_t>> witness_candidates(const Program& prog) {
  // Alphabet: comparison constants plus neighbors, capped small so the
  // bounded exhaustive search stays cheap.
  std::set<int64_t> consts;
  for (const Function& f : prog.functions)
    for (const BasicBlock& b : f.blocks)
      for (const Instruction& i : b.instructions)
        if (auto* c = i.as<ConstIns>()) consts.insert(c->value);
  std::vector<uint8_t> alphabet;
  for (int64_t v : consts)
    if (v >= 0 && v < 256) alphabet.push_back(static_cast<uint8_t>(v));
  for (uint8_t v : {uint8_t{0}, uint8_t{1}, uint8_t{3}, uint8_t{128}})
    alphabet.push_back(v);
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  if (alphabet.size() > 6) alphabet.resize(6);

  std::vector<std::vector<uint8_t>> out;
  out.push_back({});
  size_t begin = 0;
  for (int len = 1; len <= 8 && out.size() < 60000; ++len) {
    size_t end = out.size();
    for (size_t i = begin; i < end && out.size() < 60000; ++i)
      for (uint8_t a : alphabet) {
        std::vector<uint8_t> ext = out[i];
        ext.push_back(a);
        out.push_back(std::move(ext));
      }
    begin = end;
  }
  return out;
}

}  // namespace

CorpusProgram generate_random_program(const GeneratorParams& params) {
  if (params.functions < 1 || params.functions > 64)
    throw std::invalid_argument("functions must be in [1, 64]");
  if (params.max_blocks_per_fn < 1 || params.max_blocks_per_fn > 32)
    throw std::invalid_argument("blocks per function must be in [1, 32]");
  if (params.indirect_fraction < 0 || params.indirect_fraction > 1)
    throw std::invalid_argument("indirect fraction must be in [0, 1]");

  for (int attempt = 0; attempt < 64; ++attempt) {
    uint64_t seed = params.rng_seed + 0x9e3779b97f4a7c15ULL *
                                          static_cast<uint64_t>(attempt);
    Program prog = generate_once(seed, params);

    CorpusProgram out;
    out.name = "random-" + std::to_string(params.rng_seed);
    out.source = print_program(prog);
    out.targets.target_ids = {"t1"};
    out.notes = "generated";

    if (!params.require_witness) return out;

    Interpreter eng(prog);
    InterpOptions opt;
    opt.step_budget = 4096;
    bool found = false;
    for (const auto& cand : witness_candidates(prog)) {
      ExecutionTrace tr = eng.run(cand, opt);
      if (!tr.targets_hit.empty()) {
        out.witness = cand;
        found = true;
        if (params.plant_bug && tr.termination == Termination::BugTriggered)
          out.planted_bugs = {{"g1", "direct", cand}};
        break;
      }
    }
    if (!found) continue;
    if (params.plant_bug && out.planted_bugs.empty()) {
      // The bug sits right behind the target, so the witness triggers it
      // unless the run ended earlier; resample in that case.
      continue;
    }
    return out;
  }
  throw std::runtime_error("witness search exhausted after 64 attempts");
}

}  // namespace tir
