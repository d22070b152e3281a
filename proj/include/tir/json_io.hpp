// JSON forms of the toolchain artifacts. Keys are emitted in sorted order and
// nothing here embeds timestamps, so identical runs produce identical bytes.
#pragma once

#include <json.hpp>

#include "tir/callgraph.hpp"
#include "tir/fuzz.hpp"
#include "tir/interp.hpp"
#include "tir/prune.hpp"
#include "tir/relevance.hpp"
#include "tir/replay.hpp"
#include "tir/report.hpp"

namespace tir {

nlohmann::json trace_to_json(const ExecutionTrace& tr, const Interpreter& eng);
nlohmann::json callgraph_to_json(const InverseCallGraph& icg);
nlohmann::json analysis_report_to_json(const MarkedProgram& mp,
                                       const InverseCallGraph& icg);
nlohmann::json prune_stats_to_json(const PruneStats& st);
nlohmann::json campaign_to_json(const CampaignStats& st,
                                const CampaignConfig& cfg,
                                const std::string& program_hash);
nlohmann::json replay_report_to_json(const ReplayReport& rep);
ReplayReport replay_report_from_json(const nlohmann::json& j);
nlohmann::json comparison_to_json(const Comparison& c);

// FNV-1a over a string; used for program/config fingerprints in manifests.
uint64_t fnv1a(const std::string& s);

}  // namespace tir
