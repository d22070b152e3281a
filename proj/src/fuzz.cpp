#include "tir/fuzz.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "tir/layout.hpp"

namespace tir {

const char* to_string(FuzzMode m) {
  switch (m) {
    case FuzzMode::Pruning: return "pruning";
    case FuzzMode::Minimization: return "minimization";
    case FuzzMode::Plain: return "plain";
  }
  return "?";
}

void apply_mutation_op(MutOp op, std::vector<uint8_t>& d, Rng& rng) {
  static constexpr uint8_t kInteresting[] = {0, 1, 255, 127};
  switch (op) {
    case MutOp::BitFlip: {
      if (d.empty()) return;
      size_t pos = rng.below(d.size());
      d[pos] ^= static_cast<uint8_t>(1u << rng.below(8));
      return;
    }
    case MutOp::ByteSet: {
      if (d.empty()) return;
      d[rng.below(d.size())] = static_cast<uint8_t>(rng.below(256));
      return;
    }
    case MutOp::ByteDelete: {
      if (d.empty()) return;
      d.erase(d.begin() + static_cast<long>(rng.below(d.size())));
      return;
    }
    case MutOp::ByteInsert: {
      if (d.size() >= kMaxInputLen) return;
      size_t pos = rng.below(d.size() + 1);
      d.insert(d.begin() + static_cast<long>(pos),
               static_cast<uint8_t>(rng.below(256)));
      return;
    }
    case MutOp::BlockDuplicate: {
      if (d.empty() || d.size() >= kMaxInputLen) return;
      size_t src = rng.below(d.size());
      size_t max_len = std::min<size_t>({16, d.size() - src, kMaxInputLen - d.size()});
      if (max_len == 0) return;
      size_t len = 1 + rng.below(max_len);
      std::vector<uint8_t> chunk(d.begin() + static_cast<long>(src),
                                 d.begin() + static_cast<long>(src + len));
      size_t at = rng.below(d.size() + 1);
      d.insert(d.begin() + static_cast<long>(at), chunk.begin(), chunk.end());
      return;
    }
    case MutOp::InterestingValue: {
      if (d.empty()) return;
      d[rng.below(d.size())] = kInteresting[rng.below(4)];
      return;
    }
    case MutOp::kCount: return;
  }
}

std::vector<uint8_t> mutate(const std::vector<uint8_t>& input, Rng& rng,
                            const MutationWeights& weights) {
  std::vector<uint8_t> out = input;
  double total = 0;
  for (double w : weights.w) total += w;
  uint64_t count = 1 + rng.below(16);
  for (uint64_t i = 0; i < count; ++i) {
    MutOp op = MutOp::BitFlip;
    if (total > 0) {
      double r = rng.unit() * total;
      for (int k = 0; k < static_cast<int>(MutOp::kCount); ++k) {
        r -= weights.w[k];
        if (r < 0) {
          op = static_cast<MutOp>(k);
          break;
        }
      }
    }
    apply_mutation_op(op, out, rng);
  }
  if (out.size() > kMaxInputLen) out.resize(kMaxInputLen);
  return out;
}

std::vector<uint32_t> static_block_distances(const Program& p,
                                             const InverseCallGraph& icg,
                                             const TargetSpec& spec) {
  Layout lay = Layout::build(p);
  // Forward edges: successor, call (site block -> callee entry) and return
  // (ret block -> site block). Reverse adjacency for the multi-source BFS.
  std::vector<std::vector<uint32_t>> radj(lay.n_blocks);
  for (uint32_t g = 0; g < lay.n_blocks; ++g)
    for (uint32_t s : lay.succ[g]) radj[s].push_back(g);

  std::map<uint32_t, uint32_t> block_of_ins;
  for (size_t fi = 0; fi < p.functions.size(); ++fi)
    for (size_t bi = 0; bi < p.functions[fi].blocks.size(); ++bi)
      for (const Instruction& ins :
           p.functions[fi].blocks[bi].instructions)
        block_of_ins[ins.id] =
            lay.gbid(static_cast<int>(fi), static_cast<int>(bi));

  for (const CallSite& site : icg.sites) {
    uint32_t site_block = block_of_ins.at(site.instr_id);
    for (const std::string& callee : site.candidates) {
      int ci = lay.fn_index.at(callee);
      radj[lay.entry_gbid(ci)].push_back(site_block);
      // Return edges land on the call's block-level continuation (the site
      // block's successors), not on the site block itself, which would
      // spuriously re-enable the site's own call edges.
      const Function& cf = p.functions[ci];
      for (size_t bi = 0; bi < cf.blocks.size(); ++bi) {
        uint32_t rg = lay.gbid(ci, static_cast<int>(bi));
        if (!lay.ends_in_ret[rg]) continue;
        for (uint32_t cont : lay.succ[site_block]) radj[cont].push_back(rg);
      }
    }
  }

  std::vector<uint32_t> dist(lay.n_blocks, kInfiniteDistance);
  std::deque<uint32_t> queue;
  for (const Function& f : p.functions)
    for (size_t bi = 0; bi < f.blocks.size(); ++bi)
      for (const Instruction& ins : f.blocks[bi].instructions)
        if (auto* t = ins.as<TargetIns>())
          if (spec.target_ids.count(t->id)) {
            uint32_t g = lay.gbid(lay.fn_index.at(f.name), static_cast<int>(bi));
            if (dist[g] != 0) {
              dist[g] = 0;
              queue.push_back(g);
            }
          }
  while (!queue.empty()) {
    uint32_t cur = queue.front();
    queue.pop_front();
    for (uint32_t pr : radj[cur])
      if (dist[pr] == kInfiniteDistance) {
        dist[pr] = dist[cur] + 1;
        queue.push_back(pr);
      }
  }
  return dist;
}

CampaignContext CampaignContext::prepare(const Program& p,
                                         const TargetSpec& spec,
                                         bool signature_matching) {
  CampaignContext ctx;
  ctx.original = p;
  ctx.spec = spec;
  ctx.icg = build_inverse_call_graph(ctx.original,
                                     CallGraphOptions{signature_matching});
  ctx.marked = find_relevant_blocks(ctx.original, ctx.icg, spec);
  ctx.pruned = prune(ctx.marked);
  ctx.distances = static_block_distances(ctx.original, ctx.icg, spec);
  return ctx;
}

namespace {

uint32_t hit_bucket(uint32_t count) {
  if (count <= 3) return count - 1;
  if (count <= 7) return 3;
  if (count <= 15) return 4;
  if (count <= 31) return 5;
  if (count <= 127) return 6;
  return 7;
}

struct Campaign {
  const CampaignContext& ctx;
  const CampaignConfig& cfg;
  Interpreter engine;
  Layout lay;  // layout of the executed program (identical block structure)

  std::vector<bool> spec_target;     // per engine target-table index
  std::vector<bool> relevant;        // per gbid
  std::vector<bool> relevant_seen;   // relevant blocks covered by any run
  std::unordered_map<uint64_t, uint8_t> coverage;  // edge -> bucket mask
  std::set<uint32_t> relevant_covered;
  std::vector<SeedEntry> queue;
  std::vector<std::vector<uint8_t>> corpus;
  std::map<std::vector<StackFrameRef>, size_t> bug_traces;
  CampaignStats stats;
  Rng rng;
  std::chrono::steady_clock::time_point t0;

  Campaign(const CampaignContext& c, const CampaignConfig& f)
      : ctx(c),
        cfg(f),
        engine(f.mode == FuzzMode::Pruning ? c.pruned.program : c.original),
        lay(Layout::build(f.mode == FuzzMode::Pruning ? c.pruned.program
                                                      : c.original)),
        rng(f.rng_seed),
        t0(std::chrono::steady_clock::now()) {
    const auto& tt = engine.targets();
    spec_target.resize(tt.size(), false);
    for (size_t i = 0; i < tt.size(); ++i)
      spec_target[i] = ctx.spec.target_ids.count(tt[i].id) > 0;
    relevant.assign(lay.n_blocks, false);
    relevant_seen.assign(lay.n_blocks, false);
    for (const BlockRef& br : ctx.marked.relevant_blocks) {
      int fi = lay.fn_index.at(br.first);
      relevant[lay.gbid(fi, lay.block_index[fi].at(br.second))] = true;
    }
  }

  bool stopped() const {
    if (cfg.wall_clock_seconds > 0) {
      auto dt = std::chrono::steady_clock::now() - t0;
      return std::chrono::duration<double>(dt).count() >= cfg.wall_clock_seconds;
    }
    return stats.total_steps >= cfg.exec_budget;
  }

  // True when the run produced a previously unseen (edge, bucket) pair.
  bool update_coverage(const ExecutionTrace& tr, uint64_t* key_out) {
    bool novel = false;
    uint64_t key = 1469598103934665603ULL;  // FNV offset basis
    for (const auto& [edge, count] : tr.edges) {
      uint8_t bit = static_cast<uint8_t>(1u << hit_bucket(count));
      uint8_t& mask = coverage[edge];
      if (!(mask & bit)) {
        mask |= bit;
        novel = true;
      }
      key ^= edge + bit;
      key *= 1099511628211ULL;
    }
    *key_out = key;
    return novel;
  }

  double seed_distance(const ExecutionTrace& tr) const {
    uint64_t sum = 0, n = 0;
    for (uint32_t g : tr.blocks_covered) {
      uint32_t d = ctx.distances[g];
      if (d != kInfiniteDistance) {
        sum += d;
        ++n;
      }
    }
    if (n == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(sum) / static_cast<double>(n);
  }

  void save_to_corpus(const std::vector<uint8_t>& input,
                      const ExecutionTrace& tr) {
    corpus.push_back(input);
    for (uint32_t g : tr.blocks_covered)
      if (relevant[g]) relevant_covered.insert(g);
  }

  void run_one(const std::vector<uint8_t>& input, bool is_seed) {
    InterpOptions opt;
    opt.step_budget = cfg.per_run_budget;
    ExecutionTrace tr = engine.run(input, opt);
    ++stats.executions;
    stats.total_steps += tr.steps;

    uint64_t reaches = 0;
    for (int t : tr.targets_hit)
      if (spec_target[static_cast<size_t>(t)]) ++reaches;
    stats.target_reaches += reaches;
    if (reaches > 0) ++stats.target_reaching_inputs;

    uint64_t cov_key = 0;
    bool novel = update_coverage(tr, &cov_key);

    if (tr.termination == Termination::BugTriggered) {
      auto [it, fresh] = bug_traces.emplace(tr.bug_stack, stats.bugs.size());
      if (fresh) {
        stats.bugs.push_back(CampaignBug{tr.bug_id, tr.bug_stack.front(),
                                         tr.bug_stack, stats.total_steps});
      }
      save_to_corpus(input, tr);
      return;
    }
    if (tr.termination == Termination::PrunedExit) {
      // The continuation was cut as non-reaching. Runs that advanced the
      // target-relevant frontier are still stepping stones; everything else
      // is dropped so the queue never fills with non-reaching inputs.
      ++stats.pruned_exits;
      bool new_relevant = false;
      for (uint32_t g : tr.blocks_covered)
        if (relevant[g] && !relevant_seen[g]) {
          new_relevant = true;
          break;
        }
      for (uint32_t g : tr.blocks_covered)
        if (relevant[g]) relevant_seen[g] = true;
      if (new_relevant) {
        queue.push_back(SeedEntry{input, cov_key, seed_distance(tr), 1.0});
        save_to_corpus(input, tr);
      }
      return;
    }
    for (uint32_t g : tr.blocks_covered)
      if (relevant[g]) relevant_seen[g] = true;
    if (is_seed || novel) {
      queue.push_back(SeedEntry{input, cov_key, seed_distance(tr), 1.0});
      save_to_corpus(input, tr);
    }
  }

  const std::vector<uint8_t>& pick_base() {
    if (queue.empty())
      return cfg.seeds[rng.below(cfg.seeds.size())];
    bool by_distance = cfg.mode == FuzzMode::Minimization ||
                       (cfg.mode == FuzzMode::Pruning && cfg.distance_energy);
    if (!by_distance) return queue[rng.below(queue.size())].input;

    // Annealing: the distance term ramps from 0 to 1 over the first half of
    // the budget (exploration first, exploitation later).
    double progress;
    if (cfg.wall_clock_seconds > 0) {
      auto dt = std::chrono::steady_clock::now() - t0;
      progress = std::chrono::duration<double>(dt).count() /
                 (cfg.wall_clock_seconds / 2);
    } else {
      progress = static_cast<double>(stats.total_steps) /
                 (static_cast<double>(cfg.exec_budget) / 2);
    }
    double w = std::min(1.0, progress);
    double total = 0;
    for (SeedEntry& s : queue) {
      double score = std::isfinite(s.distance) ? 1.0 / (1.0 + s.distance) : 0.0;
      s.energy = std::max((1.0 - w) + w * score, 1e-6);
      total += s.energy;
    }
    double r = rng.unit() * total;
    for (SeedEntry& s : queue) {
      r -= s.energy;
      if (r < 0) return s.input;
    }
    return queue.back().input;
  }

  CampaignResult run() {
    for (const auto& seed : cfg.seeds) {
      if (stopped()) break;
      run_one(seed, true);
    }
    while (!stopped()) {
      std::vector<uint8_t> mutant = mutate(pick_base(), rng, cfg.weights);
      run_one(mutant, false);
    }
    stats.throughput = static_cast<double>(stats.executions) * 1e6 /
                       static_cast<double>(std::max<uint64_t>(1, stats.total_steps));
    stats.queue_size = queue.size();
    stats.corpus_saved = corpus.size();
    for (uint32_t g : relevant_covered)
      stats.relevant_blocks_covered.push_back(lay.block_name(g));
    return CampaignResult{std::move(stats), std::move(corpus)};
  }
};

}  // namespace

CampaignResult run_campaign(const CampaignContext& ctx,
                            const CampaignConfig& cfg) {
  if (cfg.seeds.empty()) throw std::invalid_argument("empty seed list");
  if (cfg.wall_clock_seconds <= 0) {
    if (cfg.exec_budget == 0 || cfg.per_run_budget == 0)
      throw std::invalid_argument("zero budget");
    if (cfg.exec_budget < cfg.per_run_budget)
      throw std::invalid_argument("exec budget below per-run budget");
  } else if (cfg.per_run_budget == 0) {
    throw std::invalid_argument("zero budget");
  }
  Campaign c(ctx, cfg);
  return c.run();
}

}  // namespace tir
