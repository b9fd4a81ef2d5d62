// saynav: dataset generation, experiment runs, reports and rendering.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "saynav/bench/dataset.hpp"
#include "saynav/bench/matrix.hpp"
#include "saynav/bench/render.hpp"

namespace fs = std::filesystem;
using namespace saynav;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

nlohmann::json score_json(const EpisodeScore& s) {
  return {{"shortest", s.shortest},
          {"actual", s.actual},
          {"found_order", s.found_order},
          {"optimal_order", s.optimal_order}};
}

EpisodeScore score_from_json(const nlohmann::json& j) {
  EpisodeScore s;
  s.episode = j.at("episode").get<int>();
  s.success = j.at("success").get<bool>();
  const auto& sc = j.at("score");
  s.shortest = sc.at("shortest").get<double>();
  s.actual = sc.at("actual").get<double>();
  s.found_order = sc.at("found_order").get<std::vector<std::string>>();
  s.optimal_order = sc.at("optimal_order").get<std::vector<std::string>>();
  return s;
}

// Writes results.jsonl, traces/ and summary.csv for one entry; returns its row.
MatrixRow write_entry(const fs::path& dir, const MatrixEntry& entry, const std::vector<Episode>& episodes,
                      const std::vector<EpisodeResult>& results) {
  fs::create_directories(dir / "traces");
  std::string lines;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto j = results[i].to_json();
    j["score"] = score_json(score_episode(episodes[i], results[i]));
    lines += j.dump() + "\n";
    std::string trace;
    for (const auto& t : results[i].trace) trace += t + "\n";
    write_file(dir / "traces" / ("episode_" + std::to_string(results[i].episode) + ".jsonl"), trace);
  }
  write_file(dir / "results.jsonl", lines);
  write_file(dir / "run.json",
             nlohmann::json{{"name", entry.name}, {"baseline", entry.baseline}, {"seed", entry.config.seed}}.dump(2) +
                 "\n");
  MatrixRow row = summarize_entry(entry, episodes, results);
  write_file(dir / "summary.csv", report_csv({row}));
  return row;
}

Backend parse_backend(const std::string& s) { return s == "llm" ? Backend::Llm : Backend::Heuristic; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-object navigation with scene graphs and a two-level planner"};
  app.require_subcommand(1);

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "Generate an episode file");
  DatasetSpec dspec;
  fs::path gen_out;
  bool gen_serial = false;
  gen->add_option("-n,--episodes", dspec.num_episodes, "Number of episodes")->check(CLI::PositiveNumber);
  gen->add_option("--min-rooms", dspec.min_rooms)->check(CLI::Range(1, 10));
  gen->add_option("--max-rooms", dspec.max_rooms)->check(CLI::Range(1, 10));
  gen->add_option("--seed", dspec.seed);
  gen->add_option("--split", dspec.data_type)->check(CLI::IsMember({"val", "test"}));
  gen->add_option("--out", gen_out, "Output JSON-lines file")->required();
  gen->add_flag("--serial", gen_serial, "Disable OpenMP");

  // run
  auto* run = app.add_subcommand("run", "Run episodes under one configuration (or the full matrix)");
  fs::path run_dataset, run_out, llm_config;
  std::string sg = "gt", low = "ornav", backend = "heuristic", memory = "graph", llm_endpoint, llm_model;
  std::uint64_t run_seed = 0;
  int step_budget = 2000, limit = 0;
  bool run_matrix_flag = false, run_baseline_flag = false, run_serial = false;
  run->add_option("--dataset", run_dataset)->required()->check(CLI::ExistingFile);
  run->add_option("--scene-graph", sg)->check(CLI::IsMember({"gt", "vo"}));
  run->add_option("--low-level", low)->check(CLI::IsMember({"ornav", "pnavs"}));
  run->add_option("--backend", backend)->check(CLI::IsMember({"heuristic", "llm"}));
  run->add_option("--memory", memory)->check(CLI::IsMember({"graph", "llm"}));
  run->add_option("--seed", run_seed);
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_option("--step-budget", step_budget)->check(CLI::PositiveNumber);
  run->add_option("--limit", limit, "Only the first N episodes");
  run->add_option("--llm-config", llm_config, "JSON file with endpoint settings")->check(CLI::ExistingFile);
  run->add_option("--llm-endpoint", llm_endpoint);
  run->add_option("--llm-model", llm_model);
  run->add_flag("--matrix", run_matrix_flag, "Baseline plus {gt,vo} x {ornav,pnavs}");
  run->add_flag("--baseline", run_baseline_flag, "Run the ground-truth baseline instead");
  run->add_flag("--serial", run_serial, "Disable OpenMP");

  // report
  auto* rep = app.add_subcommand("report", "Combine run directories into a table");
  std::vector<fs::path> rep_runs;
  fs::path rep_out;
  rep->add_option("--runs", rep_runs, "Run directories")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--out", rep_out, "Output prefix; writes <prefix>.csv and <prefix>.md")->required();

  // render
  auto* ren = app.add_subcommand("render", "Top-down SVG of one episode");
  fs::path ren_dataset, ren_trace, ren_out;
  int ren_episode = 0;
  ren->add_option("--dataset", ren_dataset)->required()->check(CLI::ExistingFile);
  ren->add_option("--episode", ren_episode)->required();
  ren->add_option("--trace", ren_trace)->check(CLI::ExistingFile);
  ren->add_option("--out", ren_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (dspec.max_rooms < dspec.min_rooms) throw std::invalid_argument("--max-rooms is below --min-rooms");
      auto eps = generate_dataset(dspec, !gen_serial);
      save_dataset(eps, gen_out);
      std::cout << "wrote " << eps.size() << " episodes to " << gen_out.string() << "\n";
      return 0;
    }

    if (*run) {
      auto eps = load_dataset(run_dataset);
      if (limit > 0 && static_cast<std::size_t>(limit) < eps.size()) eps.resize(static_cast<std::size_t>(limit));
      RunConfig cfg;
      cfg.scene_graph = sg == "vo" ? SceneGraphMode::VO : SceneGraphMode::GT;
      cfg.low_level = low == "pnavs" ? LowLevelKind::PNavS : LowLevelKind::OrNav;
      cfg.backend = parse_backend(backend);
      cfg.memory = memory == "llm" ? MemoryMode::LlmTracker : MemoryMode::GraphAnnotation;
      cfg.seed = run_seed;
      cfg.step_budget = step_budget;
      if (cfg.backend == Backend::Llm) {
        LlmConfig lc = llm_config.empty() ? LlmConfig{} : load_llm_config(llm_config);
        if (!llm_endpoint.empty()) lc.endpoint = llm_endpoint;
        if (!llm_model.empty()) lc.model = llm_model;
        lc.validate();
        cfg.llm = lc;
        cfg.transcript_dir = run_out / "transcripts";
      }

      std::vector<MatrixEntry> entries;
      if (run_matrix_flag) {
        entries = standard_matrix(cfg.backend, cfg.memory, cfg.seed);
        for (auto& e : entries) {
          e.config.step_budget = cfg.step_budget;
          e.config.llm = cfg.llm;
          if (!e.baseline && cfg.llm) e.config.transcript_dir = run_out / e.name / "transcripts";
        }
      } else if (run_baseline_flag) {
        entries.push_back(MatrixEntry::reference(cfg.low_level, cfg.seed));
      } else {
        entries.push_back(MatrixEntry::saynav(cfg));
      }

      const auto houses = build_houses(eps, !run_serial);
      std::vector<MatrixRow> rows;
      for (const auto& e : entries) {
        auto results = run_entry(eps, houses, e, !run_serial);
        const fs::path dir = run_matrix_flag ? run_out / e.name : run_out;
        rows.push_back(write_entry(dir, e, eps, results));
      }
      if (run_matrix_flag) {
        write_file(run_out / "report.csv", report_csv(rows));
        write_file(run_out / "report.md", report_markdown(rows));
      }
      std::cout << report_markdown(rows);
      return 0;
    }

    if (*rep) {
      std::vector<MatrixRow> rows;
      for (const auto& dir : rep_runs) {
        auto meta = nlohmann::json::parse(std::ifstream(dir / "run.json"));
        std::vector<EpisodeScore> scores;
        for (const auto& line : read_lines(dir / "results.jsonl")) scores.push_back(score_from_json(nlohmann::json::parse(line)));
        const bool baseline = meta.at("baseline").get<bool>();
        rows.push_back({meta.at("name").get<std::string>(), summarize(scores, !baseline), !baseline});
      }
      write_file(fs::path(rep_out.string() + ".csv"), report_csv(rows));
      write_file(fs::path(rep_out.string() + ".md"), report_markdown(rows));
      std::cout << report_markdown(rows);
      return 0;
    }

    if (*ren) {
      auto eps = load_dataset(ren_dataset, false);
      auto it = std::find_if(eps.begin(), eps.end(), [&](const Episode& e) { return e.house_idx == ren_episode; });
      if (it == eps.end()) throw std::invalid_argument("no episode " + std::to_string(ren_episode) + " in dataset");
      House house = house_for(*it);
      RenderOptions opts;
      for (const auto& t : it->targets) opts.targets.push_back(t.category);
      std::vector<std::string> trace;
      if (!ren_trace.empty()) trace = read_lines(ren_trace);
      write_file(ren_out, render_topdown(house, trace, opts));
      std::cout << "wrote " << ren_out.string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
