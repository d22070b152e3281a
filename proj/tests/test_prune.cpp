#include <doctest.h>

#include "tir/corpus.hpp"
#include "tir/fuzz.hpp"
#include "tir/text.hpp"

using namespace tir;

TEST_CASE("a fully relevant program is untouched") {
  // Both blocks are on or past the target, so both keep trailing markers.
  Program p = parse_program(R"(func main() -> int {
b0:
  target t1
  jmp b1
b1:
  v = const 0
  ret v
}
)");
  TargetSpec spec;
  spec.target_ids = {"t1"};
  MarkedProgram mp = find_relevant_blocks(p, build_inverse_call_graph(p), spec);
  PrunedProgram pp = prune(mp);
  CHECK(pp.stats.blocks_total == 2);
  CHECK(pp.stats.blocks_fully_pruned == 0);
  CHECK(pp.stats.blocks_partially_pruned == 0);
  CHECK(pp.stats.blocks_kept == 2);
  CHECK(pp.program == mp.program);
}

TEST_CASE("fig1: every block of the irrelevant callee starts with a pruner exit") {
  const CorpusProgram* c = find_scenario("fig1-netcdf-like");
  REQUIRE(c != nullptr);
  Program p = parse_program(c->source);
  CampaignContext ctx = CampaignContext::prepare(p, c->targets);
  const Function* dumpx = ctx.pruned.program.find_function("do_dumpx");
  REQUIRE(dumpx != nullptr);
  for (const BasicBlock& b : dumpx->blocks) {
    auto* ex = b.instructions.front().as<ExitIns>();
    REQUIRE(ex != nullptr);
    CHECK(ex->pruner_inserted);
    CHECK(ex->code == 0);
  }
  // Fully pruned blocks keep their original instructions behind the exit.
  const Function* orig_dumpx = p.find_function("do_dumpx");
  for (size_t bi = 0; bi < dumpx->blocks.size(); ++bi) {
    const auto& pruned_ins = dumpx->blocks[bi].instructions;
    const auto& orig_ins = orig_dumpx->blocks[bi].instructions;
    REQUIRE(pruned_ins.size() == orig_ins.size() + 1);
    for (size_t i = 0; i < orig_ins.size(); ++i)
      CHECK(pruned_ins[i + 1] == orig_ins[i]);
  }
}

TEST_CASE("a mid-block marker gets the exit inserted right before it") {
  Program marked = parse_program(R"(entry main
func main() -> int {
b0:
  r = call f()
  marker
  v = const 1
  ret v
}
func f() -> int {
b0:
  z = const 0
  marker
  ret z
}
)",
                                 ParseOptions{true});
  PrunedProgram pp = prune(marked);
  const auto& ins = pp.program.functions[0].blocks[0].instructions;
  REQUIRE(ins.size() == 5);
  CHECK(ins[0].as<CallDirectIns>() != nullptr);
  REQUIRE(ins[1].as<ExitIns>() != nullptr);
  CHECK(ins[1].as<ExitIns>()->pruner_inserted);
  CHECK(ins[2].is_marker());
  CHECK(ins[3].as<ConstIns>() != nullptr);
  CHECK(ins[4].as<RetIns>() != nullptr);
  CHECK(pp.stats.blocks_partially_pruned == 1);
  CHECK(pp.stats.blocks_kept == 1);  // f:b0 has a trailing marker
}

TEST_CASE("prune stats partition the block count") {
  for (const CorpusProgram& c : scenario_corpus()) {
    Program p = parse_program(c.source);
    CampaignContext ctx = CampaignContext::prepare(p, c.targets);
    const PruneStats& st = ctx.pruned.stats;
    CHECK(st.blocks_total == st.blocks_fully_pruned +
                                 st.blocks_partially_pruned + st.blocks_kept);
    CHECK(st.fully_pruned_blocks.size() == st.blocks_fully_pruned);
    CHECK(validate(ctx.pruned.program).empty());
  }
}

TEST_CASE("pruning is deterministic") {
  const CorpusProgram* c = find_scenario("deep-call-chain");
  Program p = parse_program(c->source);
  MarkedProgram mp =
      find_relevant_blocks(p, build_inverse_call_graph(p), c->targets);
  CHECK(print_program(prune(mp).program) == print_program(prune(mp).program));
}

TEST_CASE("more than one marker in a block is rejected") {
  Program marked = parse_program(R"(func main() -> int {
b0:
  marker
  v = const 0
  marker
  ret v
}
)",
                                 ParseOptions{true});
  CHECK_THROWS_AS(prune(marked), PruneError);
}

TEST_CASE("pruned runs match the original up to the inserted exit") {
  Rng rng(5);
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorParams gp;
    gp.functions = 1 + int(seed % 5);
    gp.max_blocks_per_fn = 6;
    gp.indirect_fraction = 0.4;
    gp.rng_seed = seed;
    gp.require_witness = false;
    Program orig = parse_program(generate_random_program(gp).source);
    TargetSpec spec;
    spec.target_ids = {"t1"};
    CampaignContext ctx = CampaignContext::prepare(orig, spec);

    Interpreter eo(ctx.original), ep(ctx.pruned.program);
    InterpOptions opt;
    opt.step_budget = 2000;
    opt.record_instruction_trace = true;
    for (int k = 0; k < 200; ++k) {
      std::vector<uint8_t> input(rng.below(10), 0);
      for (auto& byte : input) byte = uint8_t(rng.below(256));
      ExecutionTrace to = eo.run(input, opt);
      ExecutionTrace tp = ep.run(input, opt);
      CHECK(tp.steps <= to.steps);  // pruned-run dominance
      if (tp.termination == Termination::PrunedExit) {
        REQUIRE(!tp.instr_trace.empty());
        CHECK(tp.instr_trace.back() >= kSyntheticIdBase);
        for (size_t i = 0; i + 1 < tp.instr_trace.size(); ++i) {
          REQUIRE(i < to.instr_trace.size());
          CHECK(tp.instr_trace[i] == to.instr_trace[i]);
        }
        // The cut continuation never reaches a target.
        CHECK(to.targets_hit == tp.targets_hit);
      } else {
        CHECK(to.termination == tp.termination);
        CHECK(to.instr_trace == tp.instr_trace);
        CHECK(to.targets_hit == tp.targets_hit);
      }
    }
  }
}
