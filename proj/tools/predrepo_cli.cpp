// Copyright 2026 The predrepo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 2 input could not be
// parsed, 3 semantic error. Diagnostics go to stderr; stdout carries only
// data and summaries.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "predrepo/ablation.hpp"
#include "predrepo/aggregate.hpp"
#include "predrepo/ensemble.hpp"
#include "predrepo/portfolio.hpp"
#include "predrepo/report.hpp"
#include "predrepo/simulate.hpp"
#include "predrepo/store.hpp"
#include "predrepo/synth.hpp"

namespace {

using namespace predrepo;

constexpr int kExitParse = 2;
constexpr int kExitSemantic = 3;

// Thrown to leave a subcommand with a specific exit code.
struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void Fail(int code, const std::string& message) { throw ExitError{code, message}; }

Repository OpenRepoOrFail(const std::string& dir) {
  try {
    return Repository::Open(dir);
  } catch (const StoreError& e) {
    Fail(kExitParse, e.what());
  }
}

// Writes to `path`, or stdout when path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) Fail(kExitSemantic, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

BudgetPolicy MakePolicy(const Repository& repo, double budget_s, const std::string& fallback_id) {
  try {
    const std::size_t fallback = fallback_id.empty() ? PickFallbackConfig(repo) : repo.FindConfig(fallback_id);
    return BudgetPolicy::Create(repo, budget_s, fallback);
  } catch (const std::exception& e) {
    Fail(kExitSemantic, e.what());
  }
}

std::vector<std::string> AllConfigIds(const Repository& repo) {
  std::vector<std::string> out;
  for (const auto& c : repo.configs()) out.push_back(c.config_id);
  return out;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void RunGenerate(const GenerateArgs& args) {
  GeneratorSpec spec;
  try {
    spec = LoadGeneratorSpec(args.spec);
  } catch (const SpecError& e) {
    Fail(kExitParse, args.spec + ": " + e.what());
  }
  if (args.seed) spec.seed = *args.seed;
  const Repository repo = GenerateRepo(spec);
  WriteRepo(repo, args.out);
  std::uintmax_t bytes = 0;
  for (const char* file : {kManifestFile, kLabelsFile, kEvalsFile, kIndexFile, kBlobFile}) {
    bytes += std::filesystem::file_size(std::filesystem::path(args.out) / file);
  }
  std::cout << "datasets=" << repo.datasets().size() << " folds=" << repo.folds_per_dataset()
            << " configs=" << repo.num_configs() << " tasks=" << repo.num_tasks() << " bytes=" << bytes << '\n';
}

// --- validate ---------------------------------------------------------------

void RunValidate(const std::string& repo_dir) {
  const Repository repo = OpenRepoOrFail(repo_dir);
  const auto report = ValidateRepo(repo);
  std::cout << "task,config,violation\n";
  for (const auto& v : report) std::cout << v.task << ',' << v.config << ',' << v.message << '\n';
  if (!report.empty()) Fail(kExitSemantic, std::to_string(report.size()) + " violations");
}

// --- ensemble ---------------------------------------------------------------

struct EnsembleArgs {
  std::string repo;
  std::vector<std::string> datasets;
  std::vector<int> folds;
  std::vector<std::string> configs;
  int ensemble_size = kDefaultCaruanaSteps;
  std::string out;
  int threads = 0;
};

void RunEnsemble(const EnsembleArgs& args) {
  const Repository repo = OpenRepoOrFail(args.repo);
  std::vector<std::string> datasets = args.datasets.empty() ? repo.datasets() : args.datasets;
  std::vector<int> folds = args.folds;
  if (folds.empty()) {
    for (int f = 0; f < repo.folds_per_dataset(); ++f) folds.push_back(f);
  }
  const std::vector<std::string> configs = args.configs.empty() ? AllConfigIds(repo) : args.configs;
  std::vector<EnsembleEvaluation> evals;
  try {
    evals = EvaluateEnsemble(repo, datasets, folds, configs, args.ensemble_size, args.threads);
  } catch (const std::out_of_range& e) {
    Fail(kExitSemantic, e.what());
  }
  Output out(args.out);
  out.stream() << "dataset,fold,val_loss,test_loss,steps,weights\n";
  for (const auto& e : evals) {
    out.stream() << e.dataset << ',' << e.fold << ',' << FormatFloat(e.val_loss) << ',' << FormatFloat(e.test_loss)
                 << ',' << e.weights.steps << ',';
    bool first = true;
    for (const auto& [config, count] : e.weights.counts) {
      out.stream() << (first ? "" : ";") << repo.config(config).config_id << ':' << count;
      first = false;
    }
    out.stream() << '\n';
  }
}

// --- portfolio --------------------------------------------------------------

struct PortfolioArgs {
  std::string repo;
  int n_max = kDefaultPortfolioSize;
  std::string aggregation = "normalized";
  std::string held_out;
  std::string out;
};

void RunPortfolio(const PortfolioArgs& args) {
  const Repository repo = OpenRepoOrFail(args.repo);
  std::vector<std::size_t> train;
  if (args.held_out.empty()) {
    for (std::size_t t = 0; t < repo.num_tasks(); ++t) train.push_back(t);
  } else {
    try {
      train = LooTrainTasks(repo, args.held_out);
    } catch (const std::out_of_range& e) {
      Fail(kExitSemantic, e.what());
    }
  }
  if (train.empty()) Fail(kExitSemantic, "no training tasks left after holding out " + args.held_out);
  std::vector<std::size_t> candidates(repo.num_configs());
  for (std::size_t c = 0; c < candidates.size(); ++c) candidates[c] = c;
  const Portfolio portfolio = LearnPortfolio(repo, train, candidates, args.n_max, ParseAggregation(args.aggregation));
  Output out(args.out);
  out.stream() << "position,config,family,train_objective\n";
  for (std::size_t i = 0; i < portfolio.configs.size(); ++i) {
    const auto& config = repo.config(portfolio.configs[i]);
    out.stream() << i + 1 << ',' << config.config_id << ',' << config.family << ','
                 << FormatFloat(portfolio.objective_trajectory[i]) << '\n';
  }
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string repo;
  double budget_s = 4 * 3600.0;
  int n_max = kDefaultPortfolioSize;
  int c_max = kDefaultCaruanaSteps;
  std::string aggregation = "normalized";
  std::string fallback;
  std::string out;
  std::string report;
  std::string methods_out;
  std::optional<std::uint64_t> seed;
  bool no_baselines = false;
  int threads = 0;
};

void RunSimulate(const SimulateArgs& args) {
  const Repository repo = OpenRepoOrFail(args.repo);
  if (repo.datasets().size() < 2) Fail(kExitSemantic, "simulation needs at least two datasets");
  const BudgetPolicy policy = MakePolicy(repo, args.budget_s, args.fallback);

  PortfolioSimOptions options;
  options.n_max = args.n_max;
  options.c_max = args.c_max;
  options.aggregation = ParseAggregation(args.aggregation);
  options.threads = args.threads;

  std::vector<std::pair<std::string, std::vector<SimResult>>> methods;
  methods.emplace_back("Portfolio (ensemble)", SimulatePortfolio(repo, policy, options).results);
  PortfolioSimOptions single = options;
  single.c_max = 1;
  methods.emplace_back("Portfolio", SimulatePortfolio(repo, policy, single).results);
  if (!args.no_baselines) {
    for (const auto& family : Families(repo)) {
      for (FamilyMode mode : {FamilyMode::kDefault, FamilyMode::kTuned, FamilyMode::kTunedEnsemble}) {
        std::vector<SimResult> results;
        try {
          results = SimulateSingleFamily(repo, family, mode, policy, args.c_max, args.seed, args.threads);
        } catch (const std::invalid_argument& e) {
          std::cerr << "skipping " << family << " (" << ToString(mode) << "): " << e.what() << '\n';
          continue;
        }
        methods.emplace_back(family + " (" + std::string(ToString(mode)) + ")", std::move(results));
      }
    }
  }

  {
    Output out(args.out);
    WriteResultsHeader(out.stream());
    WriteResultsRows(out.stream(), repo, methods.front().first, methods.front().second);
  }
  if (!args.methods_out.empty()) {
    Output out(args.methods_out);
    WriteResultsHeader(out.stream());
    for (const auto& [name, results] : methods) WriteResultsRows(out.stream(), repo, name, results);
  }
  std::vector<MethodResults> table_input;
  for (const auto& [name, results] : methods) table_input.push_back(ToMethodResults(repo, name, results));
  Output report(args.report);
  WriteTable2(report.stream(), Table2Rows(ResultTable::FromMethods(table_input)));
}

// --- ablate -----------------------------------------------------------------

struct AblateArgs {
  std::string repo;
  std::string axis;
  std::vector<int> values;
  std::vector<std::uint64_t> seeds = {0};
  double budget_s = 4 * 3600.0;
  int n_max = kDefaultPortfolioSize;
  int c_max = kDefaultCaruanaSteps;
  std::string aggregation = "normalized";
  std::string fallback;
  std::string out;
  int threads = 0;
};

void RunAblate(const AblateArgs& args) {
  AblationAxis axis;
  try {
    axis = ParseAblationAxis(args.axis);
  } catch (const std::invalid_argument& e) {
    Fail(kExitParse, e.what());
  }
  const Repository repo = OpenRepoOrFail(args.repo);
  if (repo.datasets().size() < 2) Fail(kExitSemantic, "ablation needs at least two datasets");
  const BudgetPolicy policy = MakePolicy(repo, args.budget_s, args.fallback);
  PortfolioSimOptions base;
  base.n_max = args.n_max;
  base.c_max = args.c_max;
  base.aggregation = ParseAggregation(args.aggregation);
  base.threads = args.threads;
  std::vector<AblationRow> rows;
  try {
    rows = RunAblation(repo, policy, axis, args.values, args.seeds, base);
  } catch (const std::logic_error& e) {
    Fail(kExitSemantic, e.what());
  }
  Output out(args.out);
  out.stream() << "axis,value,seed,normalized_error,test_loss,train_objective,mean_normalized_error,"
                  "stderr_normalized_error\n";
  for (const auto& r : rows) {
    out.stream() << ToString(r.axis) << ',' << r.value << ',' << r.seed << ',' << FormatFloat(r.normalized_error)
                 << ',' << FormatFloat(r.test_loss) << ',' << FormatFloat(r.train_objective) << ','
                 << FormatFloat(r.mean_normalized_error) << ',' << FormatFloat(r.stderr_normalized_error) << '\n';
  }
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> results;
  std::string out;
  std::string mode = "table2";
  std::string baseline;
};

void RunReport(const ReportArgs& args) {
  std::vector<std::vector<MethodResults>> per_file;
  std::map<std::string, int> name_count;
  for (const auto& path : args.results) {
    std::ifstream in(path);
    if (!in) Fail(kExitParse, "cannot read " + path);
    try {
      per_file.push_back(ReadResultsCsv(in, path));
    } catch (const std::invalid_argument& e) {
      Fail(kExitParse, e.what());
    }
    for (const auto& m : per_file.back()) ++name_count[m.method];
  }
  // Methods whose names collide across files are qualified by file stem,
  // or by stem and position when stems collide too.
  std::vector<std::string> labels;
  std::map<std::string, int> stem_count;
  for (const auto& path : args.results) {
    labels.push_back(std::filesystem::path(path).stem().string());
    ++stem_count[labels.back()];
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (stem_count[labels[i]] > 1) labels[i] += "#" + std::to_string(i + 1);
  }
  std::vector<MethodResults> methods;
  for (std::size_t i = 0; i < per_file.size(); ++i) {
    for (auto& m : per_file[i]) {
      if (name_count[m.method] > 1) m.method = labels[i] + ":" + m.method;
      methods.push_back(std::move(m));
    }
  }
  ResultTable table;
  try {
    table = ResultTable::FromMethods(methods);
  } catch (const std::invalid_argument& e) {
    Fail(kExitSemantic, e.what());
  }

  Output out(args.out);
  if (args.mode == "table2") {
    if (table.num_methods() < 2) Fail(kExitSemantic, "table2 needs at least two methods");
    WriteTable2(out.stream(), Table2Rows(table));
  } else {
    std::size_t baseline = 0;
    if (!args.baseline.empty()) {
      const auto it = std::find(table.methods.begin(), table.methods.end(), args.baseline);
      if (it == table.methods.end()) Fail(kExitSemantic, "unknown baseline method " + args.baseline);
      baseline = static_cast<std::size_t>(it - table.methods.begin());
    }
    WriteWinRateTable(out.stream(), WinRateRows(table, baseline));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction repository and simulation tools"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  int threads = 0;

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic repository from a spec file");
  generate->add_option("--spec", gen.spec, "Generator spec (JSON)")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Override the spec seed");

  std::string validate_repo;
  auto* validate = app.add_subcommand("validate", "Check a repository's invariants");
  validate->add_option("--repo", validate_repo, "Repository directory")->required();

  EnsembleArgs ens;
  auto* ensemble = app.add_subcommand("ensemble", "Evaluate Caruana ensembles of the given configs");
  ensemble->add_option("--repo", ens.repo, "Repository directory")->required();
  ensemble->add_option("--datasets", ens.datasets, "Dataset ids (default: all)")->delimiter(',');
  ensemble->add_option("--folds", ens.folds, "Folds (default: all)")->delimiter(',');
  ensemble->add_option("--configs", ens.configs, "Config ids to ensemble (default: all)")->delimiter(',');
  ensemble->add_option("--ensemble-size", ens.ensemble_size, "Greedy selection steps")->check(CLI::PositiveNumber);
  ensemble->add_option("--out", ens.out, "Output CSV (default: stdout)");
  ensemble->add_option("--threads", threads, "Worker threads (output does not depend on it)");

  PortfolioArgs port;
  auto* portfolio = app.add_subcommand("portfolio", "Learn a portfolio on the repository's tasks");
  portfolio->add_option("--repo", port.repo, "Repository directory")->required();
  portfolio->add_option("--n-max", port.n_max, "Portfolio size")->check(CLI::PositiveNumber);
  portfolio->add_option("--aggregation", port.aggregation, "Loss aggregation across tasks")->check(CLI::IsMember({"raw", "normalized"}));
  portfolio->add_option("--held-out", port.held_out, "Dataset excluded from training");
  portfolio->add_option("--out", port.out, "Output CSV (default: stdout)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Leave-one-dataset-out anytime portfolio simulation");
  simulate->add_option("--repo", sim.repo, "Repository directory")->required();
  simulate->add_option("--budget-s", sim.budget_s, "Fitting budget per task, seconds")->check(CLI::PositiveNumber);
  simulate->add_option("--n-max", sim.n_max, "Portfolio size")->check(CLI::PositiveNumber);
  simulate->add_option("--c-max", sim.c_max, "Ensemble selection steps")->check(CLI::PositiveNumber);
  simulate->add_option("--aggregation", sim.aggregation, "Loss aggregation across tasks")->check(CLI::IsMember({"raw", "normalized"}));
  simulate->add_option("--fallback", sim.fallback, "Fallback config id (default: fastest default config)");
  simulate->add_option("--out", sim.out, "Per-task results of Portfolio (ensemble)");
  simulate->add_option("--report", sim.report, "Summary table (default: stdout)");
  simulate->add_option("--methods-out", sim.methods_out, "Per-task results of every method");
  simulate->add_option("--seed", sim.seed, "Shuffle the tuning order of single-family baselines");
  simulate->add_flag("--no-baselines", sim.no_baselines, "Skip single-family baselines");
  simulate->add_option("--threads", threads, "Worker threads (output does not depend on it)");

  AblateArgs abl;
  auto* ablate = app.add_subcommand("ablate", "Sweep one portfolio setting over values and seeds");
  ablate->add_option("--repo", abl.repo, "Repository directory")->required();
  ablate->add_option("--axis", abl.axis, "Setting to sweep")
      ->required()
      ->check(CLI::IsMember({"configs-per-family", "n-train-datasets", "portfolio-size", "ensemble-members"}));
  ablate->add_option("--values", abl.values, "Values of the swept setting")->required()->delimiter(',');
  ablate->add_option("--seeds", abl.seeds, "Subsampling seeds")->delimiter(',');
  ablate->add_option("--budget-s", abl.budget_s, "Fitting budget per task, seconds")->check(CLI::PositiveNumber);
  ablate->add_option("--n-max", abl.n_max, "Portfolio size")->check(CLI::PositiveNumber);
  ablate->add_option("--c-max", abl.c_max, "Ensemble selection steps")->check(CLI::PositiveNumber);
  ablate->add_option("--aggregation", abl.aggregation, "Loss aggregation across tasks")->check(CLI::IsMember({"raw", "normalized"}));
  ablate->add_option("--fallback", abl.fallback, "Fallback config id (default: fastest default config)");
  ablate->add_option("--out", abl.out, "Output CSV (default: stdout)");
  ablate->add_option("--threads", threads, "Worker threads (output does not depend on it)");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Aggregate per-task results into comparison tables");
  report->add_option("--results", rep.results, "Per-task results CSVs")->required()->expected(1, -1);
  report->add_option("--out", rep.out, "Output CSV (default: stdout)");
  report->add_option("--mode", rep.mode, "Table to produce")->check(CLI::IsMember({"table2", "winrate"}));
  report->add_option("--baseline", rep.baseline, "Method compared against in winrate mode (default: first)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*generate) {
      RunGenerate(gen);
    } else if (*validate) {
      RunValidate(validate_repo);
    } else if (*ensemble) {
      ens.threads = threads;
      RunEnsemble(ens);
    } else if (*portfolio) {
      RunPortfolio(port);
    } else if (*simulate) {
      sim.threads = threads;
      RunSimulate(sim);
    } else if (*ablate) {
      abl.threads = threads;
      RunAblate(abl);
    } else if (*report) {
      RunReport(rep);
    }
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSemantic;
  }
  return 0;
}
