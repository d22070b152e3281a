#include "tir/json_io.hpp"

namespace tir {

using nlohmann::json;

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

json frames_to_json(const std::vector<StackFrameRef>& stack) {
  json arr = json::array();
  for (const StackFrameRef& f : stack)
    arr.push_back({{"function", f.function}, {"instr_id", f.instr_id}});
  return arr;
}

}  // namespace

json trace_to_json(const ExecutionTrace& tr, const Interpreter& eng) {
  const Layout& lay = eng.layout();
  json j;
  j["termination"] = to_string(tr.termination);
  j["steps"] = tr.steps;
  if (tr.termination == Termination::NormalReturn) j["exit_code"] = tr.exit_code;
  if (tr.termination == Termination::BugTriggered) {
    j["bug"] = {{"id", tr.bug_id}, {"stack", frames_to_json(tr.bug_stack)}};
  }
  json hits = json::array();
  for (int t : tr.targets_hit) hits.push_back(eng.targets()[size_t(t)].id);
  j["targets_hit"] = hits;
  json blocks = json::array();
  for (uint32_t g : tr.blocks_covered) blocks.push_back(lay.block_name(g));
  j["blocks_covered"] = blocks;
  json edges = json::array();
  for (const auto& [key, count] : tr.edges)
    edges.push_back({{"from", lay.block_name(uint32_t(key >> 32))},
                     {"to", lay.block_name(uint32_t(key))},
                     {"count", count}});
  j["edges"] = edges;
  return j;
}

json callgraph_to_json(const InverseCallGraph& icg) {
  json j = json::object();
  for (const auto& [fn, sites] : icg.callers_of) {
    json arr = json::array();
    for (const CallSite& s : sites)
      arr.push_back({{"caller", s.caller},
                     {"instr_id", s.instr_id},
                     {"kind", s.indirect ? "indirect" : "direct"}});
    j[fn] = arr;
  }
  return j;
}

json analysis_report_to_json(const MarkedProgram& mp,
                             const InverseCallGraph& icg) {
  json j;
  json rel = json::array();
  for (const BlockRef& b : mp.relevant_blocks)
    rel.push_back({{"function", b.first}, {"block", b.second}});
  j["relevant_blocks"] = rel;
  j["required_functions"] = mp.required_functions;
  j["target_reaching_functions"] = mp.target_reaching_functions;
  j["targets"] = mp.spec.target_ids;
  json sites = json::array();
  for (const CallSite& s : icg.sites)
    if (s.indirect)
      sites.push_back({{"caller", s.caller},
                       {"instr_id", s.instr_id},
                       {"candidates", s.candidates},
                       {"candidate_count", s.candidates.size()}});
  j["indirect_sites"] = sites;
  j["warnings"] = icg.warnings;
  return j;
}

json prune_stats_to_json(const PruneStats& st) {
  json j;
  j["blocks_total"] = st.blocks_total;
  j["blocks_fully_pruned"] = st.blocks_fully_pruned;
  j["blocks_partially_pruned"] = st.blocks_partially_pruned;
  j["blocks_kept"] = st.blocks_kept;
  json full = json::array();
  for (const BlockRef& b : st.fully_pruned_blocks)
    full.push_back({{"function", b.first}, {"block", b.second}});
  j["fully_pruned_blocks"] = full;
  return j;
}

json campaign_to_json(const CampaignStats& st, const CampaignConfig& cfg,
                      const std::string& program_hash) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["rng_seed"] = cfg.rng_seed;
  j["exec_budget"] = cfg.exec_budget;
  j["per_run_budget"] = cfg.per_run_budget;
  j["program_hash"] = program_hash;
  {
    std::string cfg_str = std::string(to_string(cfg.mode)) + "/" +
                          std::to_string(cfg.rng_seed) + "/" +
                          std::to_string(cfg.exec_budget) + "/" +
                          std::to_string(cfg.per_run_budget) + "/" +
                          std::to_string(cfg.distance_energy);
    j["config_hash"] = fnv1a(cfg_str + program_hash);
  }
  j["executions"] = st.executions;
  j["total_steps"] = st.total_steps;
  j["target_reaches"] = st.target_reaches;
  j["target_reaching_inputs"] = st.target_reaching_inputs;
  j["throughput"] = st.throughput;
  j["pruned_exits"] = st.pruned_exits;
  j["queue_size"] = st.queue_size;
  j["corpus_saved"] = st.corpus_saved;
  j["relevant_blocks_covered"] = st.relevant_blocks_covered;
  json bugs = json::array();
  for (const CampaignBug& b : st.bugs)
    bugs.push_back({{"bug_id", b.bug_id},
                    {"primary",
                     {{"function", b.primary.function},
                      {"instr_id", b.primary.instr_id}}},
                    {"stack", frames_to_json(b.stack)},
                    {"first_hit_steps", b.first_hit_steps}});
  j["bugs"] = bugs;
  return j;
}

json replay_report_to_json(const ReplayReport& rep) {
  json j;
  j["unique_bugs"] = rep.unique_bugs;
  j["unique_traces"] = rep.unique_traces;
  if (rep.time_to_first_bug)
    j["time_to_first_bug"] = *rep.time_to_first_bug;
  else
    j["time_to_first_bug"] = nullptr;
  j["target_relevant_coverage"] = rep.target_relevant_coverage;
  j["target_reaches"] = rep.target_reaches;
  j["target_reaching_inputs"] = rep.target_reaching_inputs;
  j["throughput"] = rep.throughput;
  j["inputs"] = rep.inputs;
  j["total_steps"] = rep.total_steps;
  j["relevant_total"] = rep.relevant_total;
  j["relevant_covered"] = rep.relevant_covered;
  json bugs = json::array();
  for (const BugRecord& b : rep.bugs)
    bugs.push_back({{"bug_id", b.bug_id},
                    {"primary",
                     {{"function", b.primary_location.function},
                      {"instr_id", b.primary_location.instr_id}}},
                    {"full_trace", frames_to_json(b.full_trace)},
                    {"first_hit_steps", b.first_hit_steps}});
  j["bugs"] = bugs;
  return j;
}

ReplayReport replay_report_from_json(const json& j) {
  ReplayReport rep;
  rep.unique_bugs = j.at("unique_bugs").get<uint64_t>();
  rep.unique_traces = j.at("unique_traces").get<uint64_t>();
  if (!j.at("time_to_first_bug").is_null())
    rep.time_to_first_bug = j.at("time_to_first_bug").get<uint64_t>();
  rep.target_relevant_coverage = j.at("target_relevant_coverage").get<double>();
  rep.target_reaches = j.at("target_reaches").get<uint64_t>();
  rep.target_reaching_inputs = j.at("target_reaching_inputs").get<uint64_t>();
  rep.throughput = j.at("throughput").get<double>();
  rep.inputs = j.value("inputs", uint64_t{0});
  rep.total_steps = j.value("total_steps", uint64_t{0});
  rep.relevant_total = j.value("relevant_total", uint64_t{0});
  rep.relevant_covered = j.value("relevant_covered", uint64_t{0});
  return rep;
}

json comparison_to_json(const Comparison& c) {
  json j;
  j["a"] = c.a_name;
  j["b"] = c.b_name;
  json rows = json::array();
  for (const ComparisonRow& r : c.rows) {
    json row;
    row["metric"] = r.metric;
    row["a"] = r.a ? json(*r.a) : json(nullptr);
    row["b"] = r.b ? json(*r.b) : json(nullptr);
    row["delta"] = r.delta ? json(*r.delta) : json(nullptr);
    row["pct_change"] = r.pct_change ? json(*r.pct_change) : json(nullptr);
    row["better"] = r.better;
    row["excluded"] = r.better == "excluded";
    row["lower_is_better"] = r.lower_is_better;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

}  // namespace tir
