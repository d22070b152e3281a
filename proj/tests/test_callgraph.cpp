#include <doctest.h>

#include "tir/callgraph.hpp"
#include "tir/corpus.hpp"
#include "tir/fuzz.hpp"
#include "tir/interp.hpp"
#include "tir/text.hpp"

using namespace tir;

namespace {

Program three_fn_program() {
  return parse_program(R"(entry main
func main() -> int {
b0:
  p0 = fnaddr f
  a = const 1
  r = icall [fn(int) -> int] p0(a)
  ret r
}
func f(x: int) -> int {
b0:
  ret x
}
func g(y: int) -> int {
b0:
  ret y
}
func h() -> int {
b0:
  z = const 0
  ret z
}
)");
}

}  // namespace

TEST_CASE("match_signatures is exact structural equality") {
  Program p = three_fn_program();
  Signature zero_to_int;
  zero_to_int.ret = Type::integer();
  CHECK(match_signatures(p, zero_to_int) ==
        std::vector<std::string>{"h", "main"});

  Signature int_to_int;
  int_to_int.params = {Type::integer()};
  int_to_int.ret = Type::integer();
  CHECK(match_signatures(p, int_to_int) == std::vector<std::string>{"f", "g"});
}

TEST_CASE("a program without calls has every function as an empty key") {
  Program p = parse_program(R"(entry main
func main() -> int {
b0:
  v = const 0
  ret v
}
func lonely() -> int {
b0:
  w = const 1
  ret w
}
)");
  InverseCallGraph g = build_inverse_call_graph(p);
  REQUIRE(g.callers_of.size() == 2);
  CHECK(g.callers_of.at("main").empty());
  CHECK(g.callers_of.at("lonely").empty());
}

TEST_CASE("direct call chain produces call-site-granular inverse edges") {
  Program p = parse_program(R"(entry main
func main() -> int {
b0:
  r = call a()
  ret r
}
func a() -> int {
b0:
  r = call b()
  ret r
}
func b() -> int {
b0:
  v = const 0
  ret v
}
)");
  InverseCallGraph g = build_inverse_call_graph(p);
  REQUIRE(g.callers_of.at("b").size() == 1);
  CHECK(g.callers_of.at("b")[0].caller == "a");
  REQUIRE(g.callers_of.at("a").size() == 1);
  CHECK(g.callers_of.at("a")[0].caller == "main");
  CHECK(g.callers_of.at("main").empty());
}

TEST_CASE("indirect edges match the brute-force instruction/function scan") {
  Program p = three_fn_program();
  InverseCallGraph g = build_inverse_call_graph(p);
  // Brute force: for every call instruction and every function, decide
  // membership independently.
  for (const Function& f : p.functions) {
    for (const BasicBlock& b : f.blocks) {
      for (const Instruction& ins : b.instructions) {
        for (const Function& callee : p.functions) {
          bool expected = false;
          if (auto* cd = ins.as<CallDirectIns>())
            expected = cd->callee == callee.name;
          else if (auto* ci = ins.as<CallIndirectIns>())
            expected = callee.signature() == ci->sig;
          else
            continue;
          bool present = false;
          for (const CallSite& s : g.callers_of.at(callee.name))
            if (s.instr_id == ins.id) present = true;
          CHECK(present == expected);
        }
      }
    }
  }
  // The one indirect site has candidates {f, g}, each carrying the site.
  CHECK(g.callers_of.at("f").size() == 1);
  CHECK(g.callers_of.at("g").size() == 1);
  CHECK(g.callers_of.at("h").empty());
}

TEST_CASE("executed indirect calls always lie inside the static candidate sets") {
  Rng rng(99);
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorParams gp;
    gp.functions = 2 + int(seed % 5);
    gp.max_blocks_per_fn = 5;
    gp.indirect_fraction = 0.8;
    gp.rng_seed = seed;
    gp.require_witness = false;
    Program p = parse_program(generate_random_program(gp).source);
    InverseCallGraph g = build_inverse_call_graph(p);
    std::map<uint32_t, const CallSite*> by_id;
    for (const CallSite& s : g.sites) by_id[s.instr_id] = &s;

    Interpreter eng(p);
    InterpOptions opt;
    opt.step_budget = 3000;
    for (int k = 0; k < 50; ++k) {
      std::vector<uint8_t> input(rng.below(10), 0);
      for (auto& byte : input) byte = uint8_t(rng.below(256));
      ExecutionTrace tr = eng.run(input, opt);
      for (auto [ins_id, callee_idx] : tr.indirect_calls) {
        const CallSite* site = by_id.at(ins_id);
        const std::string& callee = p.functions[size_t(callee_idx)].name;
        bool in_candidates =
            std::find(site->candidates.begin(), site->candidates.end(),
                      callee) != site->candidates.end();
        CHECK(in_candidates);
      }
    }
  }
}

TEST_CASE("adding a function with a fresh signature never removes edges") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorParams gp;
    gp.functions = 3;
    gp.max_blocks_per_fn = 4;
    gp.indirect_fraction = 0.6;
    gp.rng_seed = seed;
    gp.require_witness = false;
    Program p = parse_program(generate_random_program(gp).source);
    InverseCallGraph before = build_inverse_call_graph(p);

    Program q = p;
    Function fresh;
    fresh.name = "zz_fresh";
    fresh.ret = Type::integer();
    for (int i = 0; i < 3; ++i)
      fresh.params.push_back(Param{"q" + std::to_string(i), Type::integer()});
    BasicBlock blk{"b0", {}};
    Instruction c;
    c.id = 900000;
    c.body = ConstIns{"v", 0};
    Instruction r;
    r.id = 900001;
    r.body = RetIns{"v"};
    blk.instructions = {c, r};
    fresh.blocks.push_back(blk);
    q.functions.push_back(fresh);
    REQUIRE(validate(q).empty());

    InverseCallGraph after = build_inverse_call_graph(q);
    for (const auto& [fn, sites] : before.callers_of) {
      REQUIRE(after.callers_of.count(fn));
      CHECK(after.callers_of.at(fn).size() >= sites.size());
      for (const CallSite& s : sites) {
        bool still = false;
        for (const CallSite& t : after.callers_of.at(fn))
          if (t.instr_id == s.instr_id) still = true;
        CHECK(still);
      }
    }
  }
}

TEST_CASE("an indirect site with zero matches stays in the graph and warns") {
  // The only fn(int, int) -> int value comes from a parameter; no function in
  // the module has that signature, so the site resolves to nothing.
  Program p = parse_program(R"(entry main
func main() -> int {
b0:
  v = const 0
  ret v
}
func dispatch(h: fn(int, int) -> int) -> int {
b0:
  a = const 1
  b = const 2
  r = icall [fn(int, int) -> int] h(a, b)
  ret r
}
)");
  InverseCallGraph g = build_inverse_call_graph(p);
  REQUIRE(g.sites.size() == 1);
  CHECK(g.sites[0].indirect);
  CHECK(g.sites[0].candidates.empty());
  REQUIRE(g.warnings.size() == 1);
  CHECK(g.warnings[0].find("no signature matches") != std::string::npos);
}

TEST_CASE("fig2 candidate sets contain the dynamically executed callees") {
  const CorpusProgram* c = find_scenario("fig2-giflib-like");
  REQUIRE(c != nullptr);
  Program p = parse_program(c->source);
  InverseCallGraph g = build_inverse_call_graph(p);
  std::map<uint32_t, const CallSite*> by_id;
  for (const CallSite& s : g.sites) by_id[s.instr_id] = &s;

  Interpreter eng(p);
  ExecutionTrace tr = eng.run(c->witness, InterpOptions{100000, 1024, false});
  REQUIRE(tr.indirect_calls.size() == 2);
  for (auto [ins_id, callee_idx] : tr.indirect_calls) {
    const std::string& callee = p.functions[size_t(callee_idx)].name;
    const CallSite* site = by_id.at(ins_id);
    CHECK(std::find(site->candidates.begin(), site->candidates.end(), callee) !=
          site->candidates.end());
  }
}
