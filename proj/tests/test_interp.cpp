#include <doctest.h>

#include "tir/corpus.hpp"
#include "tir/fuzz.hpp"
#include "tir/text.hpp"

using namespace tir;

namespace {

bool traces_equal(const ExecutionTrace& a, const ExecutionTrace& b) {
  return a.termination == b.termination && a.steps == b.steps &&
         a.blocks_covered == b.blocks_covered && a.edges == b.edges &&
         a.targets_hit == b.targets_hit && a.bug_stack == b.bug_stack &&
         a.bug_id == b.bug_id;
}

std::vector<uint8_t> bytes(std::initializer_list<int> v) {
  std::vector<uint8_t> out;
  for (int x : v) out.push_back(uint8_t(x));
  return out;
}

}  // namespace

TEST_CASE("zero is false; branch edges land in the coverage") {
  Program p = parse_program(R"(func main() -> int {
b0:
  v = read_input
  br v, bT, bF
bT:
  a = const 1
  ret a
bF:
  b = const 0
  ret b
}
)");
  Interpreter eng(p);
  ExecutionTrace tr = eng.run(bytes({0x00}), {});
  const Layout& lay = eng.layout();
  uint32_t b0 = lay.gbid(0, 0), bF = lay.gbid(0, 2);
  uint64_t want = (uint64_t(b0) << 32) | bF;
  bool found = false;
  for (auto& [key, count] : tr.edges)
    if (key == want && count == 1) found = true;
  CHECK(found);
  CHECK(tr.blocks_covered == std::vector<uint32_t>{b0, bF});
}

TEST_CASE("reads past end of input yield zero") {
  Program p = parse_program(R"(func main() -> int {
b0:
  v = read_input
  w = read_input
  br w, bT, bF
bT:
  a = const 1
  ret a
bF:
  b = const 0
  ret b
}
)");
  // One byte of input: the second read must see 0 and take bF.
  ExecutionTrace tr = interpret(p, bytes({0x37}), {});
  Interpreter eng(p);
  CHECK(tr.blocks_covered.back() == eng.layout().gbid(0, 2));
}

TEST_CASE("division semantics: by zero yields zero, INT64_MIN/-1 is stable") {
  Program p = parse_program(R"(func main() -> int {
b0:
  a = const 7
  z = const 0
  q = div a, z
  ok1 = eq q, z
  br ok1, b1, bad
b1:
  m = const -9223372036854775808
  neg1 = const -1
  r = div m, neg1
  ok2 = eq r, m
  br ok2, good, bad
good:
  target t_ok
  v = const 0
  ret v
bad:
  w = const 1
  ret w
}
)");
  ExecutionTrace tr = interpret(p, {}, {});
  REQUIRE(tr.targets_hit.size() == 1);
}

TEST_CASE("step budget exhaustion is not a crash") {
  Program p = parse_program(R"(func main() -> int {
b0:
  jmp b0
}
)");
  ExecutionTrace tr = interpret(p, {}, InterpOptions{500, 1024, false});
  CHECK(tr.termination == Termination::StepBudgetExhausted);
  CHECK(tr.steps == 500);
}

TEST_CASE("runaway recursion hits the depth limit, reported as budget exhaustion") {
  Program p = parse_program(R"(func main() -> int {
b0:
  r = call main()
  ret r
}
)");
  ExecutionTrace tr = interpret(p, {}, InterpOptions{100000, 256, false});
  CHECK(tr.termination == Termination::StepBudgetExhausted);
}

TEST_CASE("bug stacks list the innermost frame first") {
  Program p = parse_program(R"(entry main
func main() -> int {
b0:
  r = call mid()
  ret r
}
func mid() -> int {
b0:
  r = call leaf()
  ret r
}
func leaf() -> int {
b0:
  bug boom
  v = const 0
  ret v
}
)");
  ExecutionTrace tr = interpret(p, {}, {});
  REQUIRE(tr.termination == Termination::BugTriggered);
  CHECK(tr.bug_id == "boom");
  REQUIRE(tr.bug_stack.size() == 3);
  CHECK(tr.bug_stack[0].function == "leaf");
  CHECK(tr.bug_stack[1].function == "mid");
  CHECK(tr.bug_stack[2].function == "main");
  // Innermost frame points at the bug instruction itself.
  const Instruction& bug_ins =
      p.find_function("leaf")->blocks[0].instructions[0];
  CHECK(tr.bug_stack[0].instr_id == bug_ins.id);
}

TEST_CASE("user exits are normal terminations; pruner exits are not") {
  Program p = parse_program(R"(func main() -> int {
b0:
  exit 3
}
)");
  ExecutionTrace tr = interpret(p, {}, {});
  CHECK(tr.termination == Termination::NormalReturn);
  CHECK(tr.exit_code == 3);

  Program q = parse_program("func main() -> int {\nb0:\n  prune_exit\n}\n",
                            ParseOptions{true});
  CHECK(interpret(q, {}, {}).termination == Termination::PrunedExit);
}

TEST_CASE("identical inputs produce identical traces") {
  const CorpusProgram* c = find_scenario("signature-collision-heavy");
  Program p = parse_program(c->source);
  Interpreter eng(p);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    std::vector<uint8_t> input(rng.below(8), 0);
    for (auto& b : input) b = uint8_t(rng.below(256));
    ExecutionTrace a = eng.run(input, {});
    ExecutionTrace b = eng.run(input, {});
    CHECK(traces_equal(a, b));
  }
}

TEST_CASE("every edge endpoint appears in blocks_covered") {
  Rng rng(11);
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorParams gp;
    gp.functions = 3;
    gp.max_blocks_per_fn = 6;
    gp.rng_seed = seed;
    gp.require_witness = false;
    Program p = parse_program(generate_random_program(gp).source);
    Interpreter eng(p);
    for (int k = 0; k < 30; ++k) {
      std::vector<uint8_t> input(rng.below(8), 0);
      for (auto& b : input) b = uint8_t(rng.below(256));
      ExecutionTrace tr = eng.run(input, InterpOptions{2000, 1024, false});
      auto covered = [&](uint32_t g) {
        return std::binary_search(tr.blocks_covered.begin(),
                                  tr.blocks_covered.end(), g);
      };
      for (auto& [key, count] : tr.edges) {
        CHECK(covered(uint32_t(key >> 32)));
        CHECK(covered(uint32_t(key)));
      }
    }
  }
}

TEST_CASE("markers are invisible at runtime") {
  const CorpusProgram* c = find_scenario("fig1-netcdf-like");
  Program p = parse_program(c->source);
  MarkedProgram mp =
      find_relevant_blocks(p, build_inverse_call_graph(p), c->targets);
  InterpOptions opt;
  opt.record_instruction_trace = true;
  ExecutionTrace orig = interpret(p, c->witness, opt);
  ExecutionTrace marked = interpret(mp.program, c->witness, opt);
  CHECK(orig.steps == marked.steps);
  CHECK(orig.instr_trace == marked.instr_trace);
  CHECK(orig.targets_hit == marked.targets_hit);
}

TEST_CASE("pruned fig1 cuts the irrelevant branch early") {
  const CorpusProgram* c = find_scenario("fig1-netcdf-like");
  Program p = parse_program(c->source);
  CampaignContext ctx = CampaignContext::prepare(p, c->targets);
  std::vector<uint8_t> wrong_arm = bytes({0x00, 0x42, 0x42});
  ExecutionTrace orig = interpret(p, wrong_arm, {});
  ExecutionTrace pruned = interpret(ctx.pruned.program, wrong_arm, {});
  CHECK(pruned.termination == Termination::PrunedExit);
  CHECK(orig.termination == Termination::NormalReturn);
  CHECK(pruned.steps < orig.steps);
}
