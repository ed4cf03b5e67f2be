// Copyright 2026 The vpd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end for the voice pathology detection pipeline.
// Exit codes: 0 success, 1 data or validation failure, 2 usage or
// configuration error, 3 unexpected internal error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vpd/pipeline.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string data_root;
  std::string metadata;
  std::string manifest;
  std::string rules;
  std::string output_dir;
  std::string cohorts;
  std::string algorithms;
  long long seed = -1;
  int jobs = 0;
  int folds = 0;
  int top_n = 0;
  int repetitions = 0;
  int subset_min = -1;
  int subset_max = -1;
  int max_specs = -1;
  bool skip_verify = false;
};

// Config file first, then flags override individual keys.
vpd::RunConfig resolve_config(const CliOptions& opt) {
  vpd::RunConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = vpd::load_config_file(opt.config_path);
  }
  const auto set = [&cfg](const std::string& key, const std::string& value) {
    vpd::apply_config_entry(cfg, key, value);
  };
  if (!opt.data_root.empty()) set("data_root", opt.data_root);
  if (!opt.metadata.empty()) set("metadata", opt.metadata);
  if (!opt.manifest.empty()) set("manifest", opt.manifest);
  if (!opt.rules.empty()) set("rules", opt.rules);
  if (!opt.output_dir.empty()) set("output_dir", opt.output_dir);
  if (!opt.cohorts.empty()) set("cohorts", opt.cohorts);
  if (!opt.algorithms.empty()) set("algorithms", opt.algorithms);
  if (opt.seed >= 0) set("seed", std::to_string(opt.seed));
  if (opt.jobs > 0) set("jobs", std::to_string(opt.jobs));
  if (opt.folds > 0) set("folds", std::to_string(opt.folds));
  if (opt.top_n > 0) set("top_n", std::to_string(opt.top_n));
  if (opt.repetitions > 0) set("repetitions", std::to_string(opt.repetitions));
  if (opt.subset_min >= 0) set("subset_min", std::to_string(opt.subset_min));
  if (opt.subset_max >= 0) set("subset_max", std::to_string(opt.subset_max));
  if (opt.max_specs >= 0) {
    set("max_specs_per_algorithm", std::to_string(opt.max_specs));
  }
  if (opt.skip_verify) set("skip_verify", "true");
  vpd::apply_env_overrides(cfg);
  return cfg;
}

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("-c,--config", opt.config_path,
                  "key=value configuration file");
  cmd->add_option("--data-root", opt.data_root,
                  "directory holding the corpus audio");
  cmd->add_option("--metadata", opt.metadata, "corpus metadata CSV");
  cmd->add_option("--manifest", opt.manifest, "sha256 manifest file");
  cmd->add_option("--rules", opt.rules, "exclusion rules CSV");
  cmd->add_option("-o,--output-dir", opt.output_dir,
                  "directory for generated outputs");
  cmd->add_option("--cohorts", opt.cohorts,
                  "'all' or comma list drawn from F,M,B");
  cmd->add_option("--algorithms", opt.algorithms,
                  "'all' or comma list drawn from "
                  "svm,knn,naive_bayes,decision_tree,random_forest,adaboost");
  cmd->add_option("--seed", opt.seed, "master random seed");
  cmd->add_option("-j,--jobs", opt.jobs, "worker thread count");
  cmd->add_option("--folds", opt.folds, "cross validation fold count");
  cmd->add_option("--top-n", opt.top_n, "models kept per algorithm");
  cmd->add_option("--repetitions", opt.repetitions,
                  "repeated validation round count");
  cmd->add_option("--subset-min", opt.subset_min, "first feature subset id");
  cmd->add_option("--subset-max", opt.subset_max, "last feature subset id");
  cmd->add_option("--max-specs", opt.max_specs,
                  "cap on hyperparameter settings per algorithm (0 = full)");
  cmd->add_flag("--skip-verify", opt.skip_verify,
                "skip manifest verification before extraction");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voice pathology detection pipeline"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* verify =
      app.add_subcommand("verify", "check corpus files against the manifest");
  add_common_options(verify, opt);
  CLI::App* extract = app.add_subcommand(
      "extract", "curate the corpus and extract acoustic features");
  add_common_options(extract, opt);
  CLI::App* gridsearch = app.add_subcommand(
      "gridsearch", "sweep feature subsets and hyperparameters");
  add_common_options(gridsearch, opt);
  CLI::App* validate = app.add_subcommand(
      "validate-top", "re-validate the best grid models with repeated CV");
  add_common_options(validate, opt);
  CLI::App* report =
      app.add_subcommand("report", "summarize validated results as text");
  add_common_options(report, opt);
  CLI::App* synth = app.add_subcommand(
      "synth", "generate the synthetic demonstration corpus");
  add_common_options(synth, opt);
  CLI::App* dump = app.add_subcommand(
      "dump-config", "print the resolved configuration and exit");
  add_common_options(dump, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const vpd::RunConfig cfg = resolve_config(opt);
    if (verify->parsed()) return vpd::cmd_verify(cfg, std::cout);
    if (extract->parsed()) return vpd::cmd_extract(cfg, std::cout);
    if (gridsearch->parsed()) return vpd::cmd_gridsearch(cfg, std::cout);
    if (validate->parsed()) return vpd::cmd_validate_top(cfg, std::cout);
    if (report->parsed()) return vpd::cmd_report(cfg, std::cout);
    if (synth->parsed()) return vpd::cmd_synth(cfg, std::cout);
    if (dump->parsed()) {
      std::cout << vpd::dump_config(cfg);
      return 0;
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const vpd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vpd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
