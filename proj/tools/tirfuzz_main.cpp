// tirfuzz: analyze -> prune -> fuzz -> replay -> report pipeline over .tir
// programs. Exit codes: 0 success, 1 usage error, 2 validation error.
#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "tir/corpus.hpp"
#include "tir/json_io.hpp"
#include "tir/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tir;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {  // maps to exit code 2
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file: " + path.string());
  out << data;
}

Program load_program(const fs::path& path, bool trusted) {
  try {
    return parse_program(read_file(path), ParseOptions{trusted});
  } catch (const ParseError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

TargetSpec parse_targets(const std::string& csv) {
  TargetSpec spec;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) spec.target_ids.insert(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (spec.target_ids.empty()) throw UsageError("no target ids given");
  return spec;
}

std::vector<uint8_t> parse_input_arg(const std::string& arg) {
  if (arg.rfind("hex:", 0) == 0) {
    std::string hex = arg.substr(4);
    if (hex.size() % 2) throw UsageError("odd-length hex input");
    std::vector<uint8_t> out;
    for (size_t i = 0; i < hex.size(); i += 2) {
      auto nib = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw UsageError("bad hex digit in input");
      };
      out.push_back(static_cast<uint8_t>(nib(hex[i]) * 16 + nib(hex[i + 1])));
    }
    return out;
  }
  if (!arg.empty() && arg[0] == '@') {
    std::string data = read_file(arg.substr(1));
    return std::vector<uint8_t>(data.begin(), data.end());
  }
  throw UsageError("input must be hex:<digits> or @<file>");
}

std::string program_hash_hex(const Program& p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(print_program(p))));
  return buf;
}

void write_corpus_dir(const fs::path& dir,
                      const std::vector<std::vector<uint8_t>>& corpus,
                      const json& manifest) {
  fs::create_directories(dir);
  for (size_t i = 0; i < corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "id-%06zu", i);
    std::ofstream out(dir / name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(corpus[i].data()),
              static_cast<std::streamsize>(corpus[i].size()));
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<std::vector<uint8_t>> read_corpus_dir(const fs::path& dir,
                                                  json* manifest_out) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    if (e.path().filename() == "manifest.json") {
      *manifest_out = json::parse(read_file(e.path()));
      continue;
    }
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::vector<uint8_t>> corpus;
  for (const fs::path& f : files) {
    std::string data = read_file(f);
    corpus.emplace_back(data.begin(), data.end());
  }
  return corpus;
}

std::vector<std::vector<uint8_t>> default_seeds() {
  return {std::vector<uint8_t>(8, 0)};
}

// ---- pipeline --------------------------------------------------------------

struct TrialResult {
  CampaignStats campaign;
  ReplayReport replay_report;
};

struct PipelineArgs {
  std::string program_path;
  std::string targets_csv;
  std::vector<std::string> modes{"pruning", "minimization"};
  uint64_t budget_steps = 2'000'000;
  uint64_t per_run_budget = 4096;
  int trials = 10;
  uint64_t rng_seed_base = 1;
  std::string out_dir = "pipeline-out";
  int jobs = 1;
  bool no_signature_matching = false;
};

FuzzMode mode_from_name(const std::string& name) {
  if (name == "pruning") return FuzzMode::Pruning;
  if (name == "minimization") return FuzzMode::Minimization;
  if (name == "plain") return FuzzMode::Plain;
  throw UsageError("unknown mode: " + name);
}

std::optional<double> campaign_ttb(const CampaignStats& st) {
  if (st.bugs.empty()) return std::nullopt;
  uint64_t best = st.bugs.front().first_hit_steps;
  for (const CampaignBug& b : st.bugs) best = std::min(best, b.first_hit_steps);
  return static_cast<double>(best);
}

int run_pipeline(const PipelineArgs& a) {
  Program prog = load_program(a.program_path, false);
  TargetSpec spec = parse_targets(a.targets_csv);
  CampaignContext ctx =
      CampaignContext::prepare(prog, spec, !a.no_signature_matching);
  std::string phash = program_hash_hex(prog);

  fs::path out(a.out_dir);
  fs::create_directories(out);
  write_file(out / "marked.tir", print_program(ctx.marked.program));
  write_file(out / "pruned.tir", print_program(ctx.pruned.program));

  struct Task {
    std::string mode_name;
    FuzzMode mode;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const std::string& m : a.modes)
    for (int t = 0; t < a.trials; ++t)
      tasks.push_back({m, mode_from_name(m), a.rng_seed_base + uint64_t(t)});

  std::vector<TrialResult> results(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      CampaignConfig cfg;
      cfg.mode = t.mode;
      cfg.seeds = default_seeds();
      cfg.exec_budget = a.budget_steps;
      cfg.per_run_budget = a.per_run_budget;
      cfg.rng_seed = t.seed;
      CampaignResult res = run_campaign(ctx, cfg);
      ReplayReport rep = replay(res.corpus, ctx.marked, a.per_run_budget);

      fs::path tdir = out / t.mode_name / ("trial-" + std::to_string(t.seed));
      json manifest = {{"program_hash", phash},
                       {"mode", t.mode_name},
                       {"rng_seed", t.seed},
                       {"targets", spec.target_ids}};
      write_corpus_dir(tdir / "corpus", res.corpus, manifest);
      write_file(tdir / "campaign.json",
                 campaign_to_json(res.stats, cfg, phash).dump(2) + "\n");
      write_file(tdir / "replay.json",
                 replay_report_to_json(rep).dump(2) + "\n");
      results[i] = TrialResult{std::move(res.stats), std::move(rep)};
      std::fprintf(stderr, "[pipeline] %s trial %llu done\n",
                   t.mode_name.c_str(), (unsigned long long)t.seed);
    }
  };
  {
    int n = std::max(1, a.jobs);
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  auto trial_of = [&](const std::string& mode, int t) -> const TrialResult& {
    for (size_t i = 0; i < tasks.size(); ++i)
      if (tasks[i].mode_name == mode &&
          tasks[i].seed == a.rng_seed_base + uint64_t(t))
        return results[i];
    throw std::logic_error("trial lookup");
  };

  json summary;
  summary["program_hash"] = phash;
  summary["budget_steps"] = a.budget_steps;
  summary["trials"] = a.trials;
  summary["modes"] = a.modes;

  struct Metric {
    std::string name;
    bool lower_better;
    std::function<std::optional<double>(const TrialResult&)> get;
  };
  std::vector<Metric> metrics = {
      {"executions", false,
       [](const TrialResult& r) { return double(r.campaign.executions); }},
      {"throughput", false,
       [](const TrialResult& r) { return r.campaign.throughput; }},
      {"target_reaches", false,
       [](const TrialResult& r) { return double(r.campaign.target_reaches); }},
      {"target_reaching_inputs", false,
       [](const TrialResult& r) {
         return double(r.campaign.target_reaching_inputs);
       }},
      {"target_relevant_coverage", false,
       [](const TrialResult& r) { return r.replay_report.target_relevant_coverage; }},
      {"unique_bugs", false,
       [](const TrialResult& r) { return double(r.replay_report.unique_bugs); }},
      {"unique_traces", false,
       [](const TrialResult& r) { return double(r.replay_report.unique_traces); }},
      {"time_to_first_bug", true,
       [](const TrialResult& r) { return campaign_ttb(r.campaign); }},
  };

  json per_mode = json::object();
  for (const std::string& m : a.modes) {
    json jm = json::object();
    for (const Metric& met : metrics) {
      double sum = 0;
      int n = 0;
      for (int t = 0; t < a.trials; ++t)
        if (auto v = met.get(trial_of(m, t))) {
          sum += *v;
          ++n;
        }
      jm[met.name] = n == 0 ? json(nullptr) : json(sum / n);
      jm[met.name + "_trials"] = n;
    }
    per_mode[m] = jm;
  }
  summary["per_mode_mean"] = per_mode;

  std::string table_text;
  json pairwise = json::object();
  for (size_t i = 0; i + 1 < a.modes.size(); ++i)
    for (size_t k = i + 1; k < a.modes.size(); ++k) {
      const std::string& ma = a.modes[i];
      const std::string& mb = a.modes[k];
      json rows = json::array();
      for (const Metric& met : metrics) {
        std::vector<double> va, vb;
        int excluded = 0;
        for (int t = 0; t < a.trials; ++t) {
          auto x = met.get(trial_of(ma, t));
          auto y = met.get(trial_of(mb, t));
          if (x && y) {
            va.push_back(*x);
            vb.push_back(*y);
          } else {
            ++excluded;
          }
        }
        SignTest st = sign_test(va, vb, met.lower_better);
        double mean_a = 0, mean_b = 0;
        for (double v : va) mean_a += v;
        for (double v : vb) mean_b += v;
        if (!va.empty()) {
          mean_a /= double(va.size());
          mean_b /= double(vb.size());
        }
        rows.push_back({{"metric", met.name},
                        {"mean_" + ma, va.empty() ? json(nullptr) : json(mean_a)},
                        {"mean_" + mb, vb.empty() ? json(nullptr) : json(mean_b)},
                        {"wins_" + ma, st.wins_a},
                        {"wins_" + mb, st.wins_b},
                        {"ties", st.ties},
                        {"sign_test_p", st.p_value},
                        {"excluded_trials", excluded},
                        {"lower_is_better", met.lower_better}});
        char line[256];
        std::snprintf(line, sizeof line,
                      "%-26s %s=%.4g %s=%.4g wins %d:%d ties %d p=%.3g%s\n",
                      met.name.c_str(), ma.c_str(), mean_a, mb.c_str(), mean_b,
                      st.wins_a, st.wins_b, st.ties, st.p_value,
                      excluded > 0 ? " (some trials excluded)" : "");
        table_text += line;
      }
      pairwise[ma + "_vs_" + mb] = rows;
      table_text += "\n";
    }
  summary["pairwise"] = pairwise;

  write_file(out / "comparison.json", summary.dump(2) + "\n");
  write_file(out / "comparison.txt", table_text);
  std::cout << table_text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"directed fuzzing toolkit over .tir programs"};
  app.require_subcommand(1);
  // Config file form: tirfuzz --config run.conf <subcommand>, with the
  // subcommand's options in a [subcommand] section. Flags override the file.
  app.set_config("--config");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "find relevant blocks, mark them");
  std::string an_program, an_targets, an_marked, an_report, an_callgraph;
  bool an_dump_cg = false, an_no_sig = false;
  analyze->add_option("--program", an_program)->required();
  analyze->add_option("--targets", an_targets);
  analyze->add_option("--emit-marked", an_marked);
  analyze->add_option("--emit-report", an_report);
  analyze->add_flag("--dump-callgraph", an_dump_cg);
  analyze->add_option("--callgraph-out", an_callgraph);
  analyze->add_flag("--no-signature-matching", an_no_sig);

  // prune
  auto* prune_cmd = app.add_subcommand("prune", "insert exits into a marked program");
  std::string pr_in, pr_out, pr_stats;
  prune_cmd->add_option("--in", pr_in)->required();
  prune_cmd->add_option("--out", pr_out)->required();
  prune_cmd->add_option("--stats", pr_stats);

  // run
  auto* run_cmd = app.add_subcommand("run", "interpret a program on one input");
  std::string rn_program, rn_input = "hex:";
  uint64_t rn_budget = 1'000'000;
  bool rn_json = false;
  run_cmd->add_option("--program", rn_program)->required();
  run_cmd->add_option("--input", rn_input);
  run_cmd->add_option("--budget", rn_budget);
  run_cmd->add_flag("--json", rn_json);

  // fuzz
  auto* fuzz_cmd = app.add_subcommand("fuzz", "run one fuzzing campaign");
  std::string fz_program, fz_targets, fz_mode = "pruning", fz_out, fz_corpus;
  std::vector<std::string> fz_seeds;
  uint64_t fz_budget = 2'000'000, fz_per_run = 4096, fz_rng = 1;
  double fz_wall = 0;
  bool fz_no_sig = false, fz_dist_energy = false;
  fuzz_cmd->add_option("--program", fz_program)->required();
  fuzz_cmd->add_option("--targets", fz_targets)->required();
  fuzz_cmd->add_option("--mode", fz_mode)
      ->check(CLI::IsMember({"pruning", "minimization", "plain"}));
  fuzz_cmd->add_option("--budget-steps", fz_budget);
  fuzz_cmd->add_option("--per-run-budget", fz_per_run);
  fuzz_cmd->add_option("--rng-seed", fz_rng);
  fuzz_cmd->add_option("--out", fz_out);
  fuzz_cmd->add_option("--corpus-dir", fz_corpus);
  fuzz_cmd->add_option("--seed-input", fz_seeds,
                       "initial seed (hex:.. or @file), repeatable");
  fuzz_cmd->add_option("--budget-seconds", fz_wall);
  fuzz_cmd->add_flag("--no-signature-matching", fz_no_sig);
  fuzz_cmd->add_flag("--distance-energy", fz_dist_energy);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "replay a corpus, compute metrics");
  std::string rp_corpus, rp_marked, rp_report, rp_targets;
  uint64_t rp_per_run = 4096;
  replay_cmd->add_option("--corpus", rp_corpus)->required();
  replay_cmd->add_option("--marked", rp_marked)->required();
  replay_cmd->add_option("--report", rp_report);
  replay_cmd->add_option("--targets", rp_targets);
  replay_cmd->add_option("--per-run-budget", rp_per_run);

  // report
  auto* report_cmd = app.add_subcommand("report", "compare two replay reports");
  std::vector<std::string> rc_compare;
  std::string rc_format = "table", rc_out;
  report_cmd->add_option("--compare", rc_compare)->expected(2)->required();
  report_cmd->add_option("--format", rc_format)
      ->check(CLI::IsMember({"table", "json", "csv"}));
  report_cmd->add_option("--out", rc_out);

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "benchmark program corpus");
  auto* corpus_list = corpus_cmd->add_subcommand("list", "list shipped scenarios");
  auto* corpus_emit = corpus_cmd->add_subcommand("emit", "write a scenario to disk");
  std::string ce_name, ce_out = ".";
  corpus_emit->add_option("name", ce_name)->required();
  corpus_emit->add_option("--out", ce_out);
  auto* corpus_gen = corpus_cmd->add_subcommand("gen", "generate a random program");
  GeneratorParams gen_params;
  std::string cg_out = ".";
  corpus_gen->add_option("--seed", gen_params.rng_seed);
  corpus_gen->add_option("--functions", gen_params.functions);
  corpus_gen->add_option("--blocks", gen_params.max_blocks_per_fn);
  corpus_gen->add_option("--indirect-fraction", gen_params.indirect_fraction);
  corpus_gen->add_option("--collision-factor",
                         gen_params.signature_collision_factor);
  bool cg_plant_bug = false;
  corpus_gen->add_flag("--plant-bug", cg_plant_bug);
  corpus_gen->add_option("--out", cg_out);
  corpus_cmd->require_subcommand(1);

  // pipeline
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "full multi-trial comparison run");
  PipelineArgs pa;
  std::string pl_modes = "pruning,minimization";
  pipeline_cmd->add_option("--program", pa.program_path)->required();
  pipeline_cmd->add_option("--targets", pa.targets_csv)->required();
  pipeline_cmd->add_option("--modes", pl_modes);
  pipeline_cmd->add_option("--budget-steps", pa.budget_steps);
  pipeline_cmd->add_option("--per-run-budget", pa.per_run_budget);
  pipeline_cmd->add_option("--trials", pa.trials);
  pipeline_cmd->add_option("--rng-seed", pa.rng_seed_base);
  pipeline_cmd->add_option("--out", pa.out_dir);
  pipeline_cmd->add_option("--jobs", pa.jobs);
  pipeline_cmd->add_flag("--no-signature-matching", pa.no_signature_matching);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*analyze) {
      Program prog = load_program(an_program, false);
      InverseCallGraph icg =
          build_inverse_call_graph(prog, CallGraphOptions{!an_no_sig});
      for (const std::string& w : icg.warnings)
        std::cerr << "warning: " << w << "\n";
      if (an_dump_cg || !an_callgraph.empty()) {
        std::string text = callgraph_to_json(icg).dump(2) + "\n";
        if (an_callgraph.empty())
          std::cout << text;
        else
          write_file(an_callgraph, text);
      }
      if (!an_targets.empty()) {
        TargetSpec spec = parse_targets(an_targets);
        MarkedProgram mp;
        try {
          mp = find_relevant_blocks(prog, icg, spec);
        } catch (const UnknownTargetError& e) {
          throw InputError(e.what());
        }
        if (!an_marked.empty())
          write_file(an_marked, print_program(mp.program));
        if (!an_report.empty())
          write_file(an_report, analysis_report_to_json(mp, icg).dump(2) + "\n");
        if (an_marked.empty() && an_report.empty())
          std::cout << analysis_report_to_json(mp, icg).dump(2) << "\n";
      } else if (!an_dump_cg && an_callgraph.empty()) {
        throw UsageError("analyze needs --targets or --dump-callgraph");
      }
      return 0;
    }

    if (*prune_cmd) {
      Program marked = load_program(pr_in, true);
      PrunedProgram pp;
      try {
        pp = prune(marked);
      } catch (const PruneError& e) {
        throw InputError(e.what());
      }
      write_file(pr_out, print_program(pp.program));
      if (!pr_stats.empty())
        write_file(pr_stats, prune_stats_to_json(pp.stats).dump(2) + "\n");
      return 0;
    }

    if (*run_cmd) {
      Program prog = load_program(rn_program, true);
      std::vector<uint8_t> input = parse_input_arg(rn_input);
      Interpreter eng(prog);
      InterpOptions opt;
      opt.step_budget = rn_budget;
      ExecutionTrace tr = eng.run(input, opt);
      if (rn_json) {
        std::cout << trace_to_json(tr, eng).dump(2) << "\n";
      } else {
        std::cout << to_string(tr.termination) << " steps=" << tr.steps
                  << " targets_hit=" << tr.targets_hit.size() << "\n";
      }
      return 0;
    }

    if (*fuzz_cmd) {
      Program prog = load_program(fz_program, false);
      TargetSpec spec = parse_targets(fz_targets);
      CampaignContext ctx;
      try {
        ctx = CampaignContext::prepare(prog, spec, !fz_no_sig);
      } catch (const UnknownTargetError& e) {
        throw InputError(e.what());
      }
      CampaignConfig cfg;
      cfg.mode = mode_from_name(fz_mode);
      cfg.exec_budget = fz_budget;
      cfg.per_run_budget = fz_per_run;
      cfg.rng_seed = fz_rng;
      cfg.distance_energy = fz_dist_energy;
      cfg.wall_clock_seconds = fz_wall;
      if (fz_seeds.empty())
        cfg.seeds = default_seeds();
      else
        for (const std::string& s : fz_seeds) cfg.seeds.push_back(parse_input_arg(s));
      CampaignResult res = run_campaign(ctx, cfg);
      std::string phash = program_hash_hex(prog);
      json cj = campaign_to_json(res.stats, cfg, phash);
      if (fz_out.empty())
        std::cout << cj.dump(2) << "\n";
      else
        write_file(fz_out, cj.dump(2) + "\n");
      if (!fz_corpus.empty()) {
        json manifest = {{"program_hash", phash},
                         {"mode", fz_mode},
                         {"rng_seed", fz_rng},
                         {"targets", spec.target_ids}};
        write_corpus_dir(fz_corpus, res.corpus, manifest);
      }
      return 0;
    }

    if (*replay_cmd) {
      Program marked_prog = load_program(rp_marked, true);
      TargetSpec spec;
      if (!rp_targets.empty()) {
        spec = parse_targets(rp_targets);
      } else {
        for (const Function& f : marked_prog.functions)
          for (const BasicBlock& b : f.blocks)
            for (const Instruction& ins : b.instructions)
              if (auto* t = ins.as<TargetIns>()) spec.target_ids.insert(t->id);
        if (spec.target_ids.empty())
          throw InputError("program contains no target instructions");
      }
      // Re-derive the marking; the pass is idempotent on its own output.
      Program base = strip_markers(marked_prog);
      InverseCallGraph icg = build_inverse_call_graph(base);
      MarkedProgram mp;
      try {
        mp = find_relevant_blocks(base, icg, spec);
      } catch (const UnknownTargetError& e) {
        throw InputError(e.what());
      }
      json manifest;
      std::vector<std::vector<uint8_t>> corpus =
          read_corpus_dir(rp_corpus, &manifest);
      if (manifest.contains("program_hash") &&
          manifest["program_hash"].get<std::string>() != program_hash_hex(base))
        throw InputError("corpus manifest does not match this program");
      ReplayReport rep = replay(corpus, mp, rp_per_run);
      std::string text = replay_report_to_json(rep).dump(2) + "\n";
      if (rp_report.empty())
        std::cout << text;
      else
        write_file(rp_report, text);
      return 0;
    }

    if (*report_cmd) {
      auto load_rep = [&](const std::string& path) {
        json j = json::parse(read_file(path));
        if (j.contains("replay")) j = j["replay"];
        return replay_report_from_json(j);
      };
      ReplayReport a = load_rep(rc_compare[0]);
      ReplayReport b = load_rep(rc_compare[1]);
      Comparison cmp = compare_reports(a, b, "a", "b");
      std::string text;
      if (rc_format == "table")
        text = render_table(cmp);
      else if (rc_format == "csv")
        text = render_csv(cmp);
      else
        text = comparison_to_json(cmp).dump(2) + "\n";
      if (rc_out.empty())
        std::cout << text;
      else
        write_file(rc_out, text);
      return 0;
    }

    if (*corpus_cmd) {
      if (*corpus_list) {
        for (const CorpusProgram& c : scenario_corpus()) {
          std::cout << c.name << "  targets=";
          bool first = true;
          for (const std::string& t : c.targets.target_ids) {
            std::cout << (first ? "" : ",") << t;
            first = false;
          }
          std::cout << "  bugs=" << c.planted_bugs.size() << "\n";
        }
        return 0;
      }
      auto emit = [&](const CorpusProgram& c, const fs::path& dir) {
        write_file(dir / (c.name + ".tir"), c.source);
        std::string w(c.witness.begin(), c.witness.end());
        write_file(dir / (c.name + ".witness"), w);
        json meta;
        meta["name"] = c.name;
        meta["targets"] = c.targets.target_ids;
        meta["notes"] = c.notes;
        json bugs = json::array();
        for (const PlantedBug& b : c.planted_bugs) {
          json jb;
          jb["bug_id"] = b.bug_id;
          jb["reachable_only_via"] = b.reachable_only_via;
          std::string hex;
          for (uint8_t byte : b.witness) {
            char hb[4];
            std::snprintf(hb, sizeof hb, "%02x", byte);
            hex += hb;
          }
          jb["witness_hex"] = hex;
          bugs.push_back(jb);
        }
        meta["planted_bugs"] = bugs;
        write_file(dir / (c.name + ".json"), meta.dump(2) + "\n");
      };
      if (*corpus_emit) {
        const CorpusProgram* c = find_scenario(ce_name);
        if (!c) throw InputError("unknown scenario: " + ce_name);
        emit(*c, ce_out);
        return 0;
      }
      if (*corpus_gen) {
        gen_params.plant_bug = cg_plant_bug;
        CorpusProgram c = generate_random_program(gen_params);
        emit(c, cg_out);
        std::cout << c.name << ".tir written\n";
        return 0;
      }
      return 0;
    }

    if (*pipeline_cmd) {
      pa.modes.clear();
      std::string cur;
      for (char c : pl_modes + ",") {
        if (c == ',') {
          if (!cur.empty()) pa.modes.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (pa.modes.empty()) throw UsageError("no modes given");
      for (const std::string& m : pa.modes) (void)mode_from_name(m);
      return run_pipeline(pa);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownTargetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
