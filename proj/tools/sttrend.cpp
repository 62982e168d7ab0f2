// Batch command line front end for the station trend pipeline.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "sttrend/corpus.hpp"
#include "sttrend/error.hpp"
#include "sttrend/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::map<std::string, std::string> values;

  // Registers `--flag` writing into values[key] when given.
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  sttrend::PipelineConfig resolve() const {
    sttrend::PipelineConfig cfg;
    if (!config.empty()) sttrend::apply_config_file(cfg, config);
    for (const auto& [k, v] : values) cfg.set(k, v);
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Station temperature trend, clustering and dependence analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  app.add_option("--config", ov.config, "flat key = value config file")->check(CLI::ExistingFile);
  ov.add(&app, "--seed", "seed", "root random seed");
  ov.add(&app, "--out", "out_dir", "output / workspace directory");

  auto analysis_flags = [&](CLI::App* sub) {
    ov.add(sub, "--corpus", "corpus_dir", "directory with <id>.csv files and stations.csv");
    ov.add(sub, "--manifest", "manifest", "station manifest (default <corpus>/stations.csv)");
    ov.add(sub, "--window", "window", "analysis years, e.g. 2002-2021");
    ov.add(sub, "--timezone", "timezone", "timezone of raw timestamps (UTC or +HH:MM)");
    ov.add(sub, "--local-dist", "local_dist", "manhattan|euclidean");
    ov.add(sub, "--weights", "weights", "DTW step weights wh,wv,wd");
    ov.add(sub, "--lambda", "lambda", "DTW off-diagonal penalty");
    ov.add(sub, "--k", "k", "cluster count");
    ov.add(sub, "--k-range", "k_range", "k range for silhouette sensitivity, e.g. 2:6");
    ov.add(sub, "--permutations", "permutations", "dcor permutation count");
    ov.add(sub, "--baseline", "baseline", "anomaly baseline years, e.g. 1991-2020");
    ov.add(sub, "--threads", "threads", "worker threads (0 = all cores)");
  };

  auto* gen = app.add_subcommand("gen-corpus", "write the bundled synthetic corpus");
  std::string gen_window = "2002-2021";
  gen->add_option("--window", gen_window, "corpus years");

  struct Stage {
    const char* name;
    const char* help;
    void (*fn)(const sttrend::PipelineConfig&, const std::filesystem::path&);
  };
  const Stage stages[] = {
      {"ingest", "parse raw files, write monthly means and missingness", sttrend::stage_ingest},
      {"impute", "window and impute monthly means, derive annual means", sttrend::stage_impute},
      {"trends", "annual trend table and monthly Sen slopes", sttrend::stage_trends},
      {"cluster", "DTW distance matrices, clustering and silhouettes", sttrend::stage_cluster},
      {"dcor", "distance correlation matrices", sttrend::stage_dcor},
      {"anomaly", "annual anomalies against a baseline window", sttrend::stage_anomaly},
  };
  std::map<CLI::App*, const Stage*> stage_of;
  for (const auto& s : stages) {
    auto* sub = app.add_subcommand(s.name, s.help);
    analysis_flags(sub);
    stage_of[sub] = &s;
  }
  auto* all = app.add_subcommand("run-all", "run every stage into --out");
  analysis_flags(all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      sttrend::PipelineConfig cfg = ov.resolve();
      sttrend::SyntheticSpec spec = sttrend::default_synthetic_spec(cfg.seed);
      sttrend::PipelineConfig window;
      window.set("window", gen_window);
      spec.start_year = window.start_year;
      spec.end_year = window.end_year;
      const auto target = ov.values.count("out_dir") ? cfg.out_dir : cfg.corpus_dir;
      const auto stations = sttrend::gen_corpus(spec, target);
      std::cout << "wrote " << stations.size() << " stations to " << target.string() << "\n";
      return 0;
    }
    const sttrend::PipelineConfig cfg = ov.resolve();
    if (all->parsed()) {
      sttrend::run_pipeline(cfg);
      std::cout << "wrote bundle to " << cfg.out_dir.string() << "\n";
      return 0;
    }
    for (const auto& [sub, stage] : stage_of) {
      if (sub->parsed()) {
        std::filesystem::create_directories(cfg.out_dir);
        stage->fn(cfg, cfg.out_dir);
        std::cout << stage->name << ": done\n";
      }
    }
    return 0;
  } catch (const sttrend::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
