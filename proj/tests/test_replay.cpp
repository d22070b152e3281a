#include <doctest.h>

#include <algorithm>

#include "tir/corpus.hpp"
#include "tir/fuzz.hpp"
#include "tir/replay.hpp"
#include "tir/report.hpp"
#include "tir/text.hpp"

using namespace tir;

namespace {

MarkedProgram marked_scenario(const std::string& name) {
  const CorpusProgram* c = find_scenario(name);
  REQUIRE(c != nullptr);
  Program p = parse_program(c->source);
  return find_relevant_blocks(p, build_inverse_call_graph(p), c->targets);
}

std::vector<uint8_t> bytes(std::initializer_list<int> v) {
  std::vector<uint8_t> out;
  for (int x : v) out.push_back(uint8_t(x));
  return out;
}

}  // namespace

TEST_CASE("an empty corpus replays to a zero report") {
  MarkedProgram mp = marked_scenario("multi-target");
  ReplayReport rep = replay({}, mp, 4096);
  CHECK(rep.inputs == 0);
  CHECK(rep.unique_bugs == 0);
  CHECK(rep.unique_traces == 0);
  CHECK(!rep.time_to_first_bug.has_value());
  CHECK(rep.target_relevant_coverage == 0.0);
  CHECK(rep.target_reaches == 0);
}

TEST_CASE("same bug through two stacks: one unique bug, two unique traces") {
  MarkedProgram mp = marked_scenario("post-target-bug");
  std::vector<std::vector<uint8_t>> corpus = {bytes({127, 255}),
                                              bytes({127, 1})};
  ReplayReport rep = replay(corpus, mp, 4096);
  CHECK(rep.unique_bugs == 1);
  CHECK(rep.unique_traces == 2);
  REQUIRE(rep.bugs.size() == 2);
  CHECK(rep.bugs[0].primary_location == rep.bugs[1].primary_location);
  CHECK(rep.bugs[0].full_trace != rep.bugs[1].full_trace);
  CHECK(rep.bugs[0].primary_location == rep.bugs[0].full_trace.front());
}

TEST_CASE("fig1 coverage is strictly below one when a relevant arm is unexercised") {
  MarkedProgram mp = marked_scenario("fig1-netcdf-like");
  // Hand enumeration of the relevant blocks of this scenario.
  std::set<BlockRef> expected = {
      {"main", "b0"},      {"main", "b_dump"},  {"do_dump", "bd0"},
      {"do_dump", "bd_t"}, {"do_dump", "bd_post"}, {"do_dump", "bd_bug"},
      {"do_dump", "bd_ret"}};
  REQUIRE(mp.relevant_blocks == expected);

  // One target-reaching input that never takes the bd_bug arm.
  ReplayReport rep = replay({bytes({127, 255, 0})}, mp, 4096);
  CHECK(rep.relevant_total == 7);
  CHECK(rep.relevant_covered == 6);
  CHECK(rep.target_relevant_coverage == doctest::Approx(6.0 / 7.0));
  CHECK(rep.target_relevant_coverage < 1.0);
  CHECK(rep.target_reaches == 1);
  CHECK(rep.target_reaching_inputs == 1);
}

TEST_CASE("bug deduplication does not depend on corpus order") {
  MarkedProgram mp = marked_scenario("post-target-bug");
  std::vector<std::vector<uint8_t>> corpus = {
      bytes({127, 255}), bytes({127, 0}), bytes({127, 1}), bytes({127, 255})};
  ReplayReport base = replay(corpus, mp, 4096);
  std::sort(corpus.begin(), corpus.end());
  do {
    ReplayReport rep = replay(corpus, mp, 4096);
    CHECK(rep.unique_bugs == base.unique_bugs);
    CHECK(rep.unique_traces == base.unique_traces);
    CHECK(rep.target_relevant_coverage == base.target_relevant_coverage);
    CHECK(rep.target_reaches == base.target_reaches);
  } while (std::next_permutation(corpus.begin(), corpus.end()));
}

TEST_CASE("replayed corpus coverage equals the live campaign coverage") {
  const CorpusProgram* c = find_scenario("fig2-giflib-like");
  Program p = parse_program(c->source);
  CampaignContext ctx = CampaignContext::prepare(p, c->targets);
  CampaignConfig cfg;
  cfg.mode = FuzzMode::Pruning;
  cfg.seeds = {std::vector<uint8_t>(8, 0)};
  cfg.exec_budget = 300000;
  cfg.per_run_budget = 2048;
  cfg.rng_seed = 21;
  CampaignResult res = run_campaign(ctx, cfg);
  ReplayReport rep = replay(res.corpus, ctx.marked, cfg.per_run_budget);

  // Markers retained in the pruned program keep block names aligned, so the
  // replay-side set must equal the live one.
  Layout lay = Layout::build(ctx.marked.program);
  CHECK(rep.relevant_covered == res.stats.relevant_blocks_covered.size());
  std::set<std::string> live(res.stats.relevant_blocks_covered.begin(),
                             res.stats.relevant_blocks_covered.end());
  // Recompute the replay-side names for comparison.
  std::set<std::string> replay_names;
  {
    Interpreter eng(ctx.marked.program);
    std::vector<bool> relevant(lay.n_blocks, false);
    for (const BlockRef& br : ctx.marked.relevant_blocks) {
      int fi = lay.fn_index.at(br.first);
      relevant[lay.gbid(fi, lay.block_index[fi].at(br.second))] = true;
    }
    InterpOptions opt;
    opt.step_budget = cfg.per_run_budget;
    for (const auto& input : res.corpus) {
      ExecutionTrace tr = eng.run(input, opt);
      for (uint32_t g : tr.blocks_covered)
        if (relevant[g]) replay_names.insert(lay.block_name(g));
    }
  }
  CHECK(replay_names == live);
}

TEST_CASE("comparing a report with itself gives all-zero deltas") {
  MarkedProgram mp = marked_scenario("post-target-bug");
  ReplayReport rep = replay({bytes({127, 255}), bytes({127, 0})}, mp, 4096);
  Comparison cmp = compare_reports(rep, rep);
  REQUIRE(cmp.rows.size() == 7);
  for (const ComparisonRow& r : cmp.rows) {
    CHECK(r.better != "excluded");
    REQUIRE(r.delta.has_value());
    CHECK(*r.delta == 0.0);
    CHECK(r.better == "tie");
  }
}

TEST_CASE("throughput 10 vs 5 reads as +100% in favor of a") {
  ReplayReport a, b;
  a.throughput = 10;
  b.throughput = 5;
  Comparison cmp = compare_reports(a, b);
  const ComparisonRow* row = nullptr;
  for (const ComparisonRow& r : cmp.rows)
    if (r.metric == "throughput") row = &r;
  REQUIRE(row != nullptr);
  CHECK(*row->pct_change == doctest::Approx(100.0));
  CHECK(row->better == "a");
}

TEST_CASE("missing values exclude a row instead of fabricating a winner") {
  ReplayReport a, b;
  a.time_to_first_bug = 100;  // b never found a bug
  Comparison cmp = compare_reports(a, b);
  for (const ComparisonRow& r : cmp.rows)
    if (r.metric == "time_to_first_bug") CHECK(r.better == "excluded");
  // Lower is better when both present.
  b.time_to_first_bug = 50;
  Comparison cmp2 = compare_reports(a, b);
  for (const ComparisonRow& r : cmp2.rows)
    if (r.metric == "time_to_first_bug") CHECK(r.better == "b");
}

TEST_CASE("sign test counts paired wins and ties") {
  SignTest st = sign_test({3, 2, 2, 5}, {1, 2, 3, 4});
  CHECK(st.wins_a == 2);
  CHECK(st.wins_b == 1);
  CHECK(st.ties == 1);
  CHECK(st.p_value > 0.0);
  CHECK(st.p_value <= 1.0);

  SignTest lower = sign_test({1, 1, 1}, {9, 9, 9}, true);
  CHECK(lower.wins_a == 3);
  CHECK(lower.p_value == doctest::Approx(0.25));
}
