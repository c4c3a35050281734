#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "eigenopt/diffusion.hpp"
#include "eigenopt/errors.hpp"
#include "eigenopt/features.hpp"
#include "eigenopt/grid_world.hpp"
#include "eigenopt/io.hpp"
#include "eigenopt/learn.hpp"
#include "eigenopt/options.hpp"
#include "eigenopt/rng.hpp"
#include "eigenopt/sampled.hpp"
#include "eigenopt/spectral.hpp"
#include "eigenopt/summation.hpp"
#include "eigenopt/version.hpp"

namespace eigenopt::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr double kGramTolerance = 1e-9;
constexpr double kAngleTolerance = 1e-6;

struct Common {
  std::string map;
  std::string laplacian = "normalized";
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

struct LoadedMap {
  GridWorld world;
  std::string path;
  std::uint64_t hash;
};

LoadedMap load(const std::string& path) {
  const std::string text = read_text_file(path);
  return {parse_map(text), path, fnv1a64(text)};
}

LaplacianKind laplacian_kind(const std::string& name) {
  return name == "combinatorial" ? LaplacianKind::kCombinatorial : LaplacianKind::kNormalized;
}

std::string hex64(std::uint64_t x) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(x));
  return buffer;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string cell_text(const GridWorld& g, State s) {
  const Cell c = g.cell(s);
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

std::string option_name(const Eigenpurpose& p) {
  return "r" + std::to_string(p.rank) + (p.sign > 0 ? "p" : "n");
}

Json base_manifest(const std::string& command, const LoadedMap& m, const Common& c) {
  Json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["map"] = {{"path", m.path}, {"fnv1a64", hex64(m.hash)}, {"states", m.world.num_states()}};
  j["laplacian"] = c.laplacian;
  j["seed"] = c.seed;
  j["created_utc"] = utc_now();
  return j;
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, std::string_view contents) {
    write_text_file(dir_ / name, contents);
    files_.push_back(name);
  }
  void finish(Json manifest) {
    manifest["outputs"] = files_;
    write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::optional<std::vector<Option>> try_bottleneck(const GridWorld& g) {
  try {
    return bottleneck_options(g);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

std::vector<Eigenoption> eigenoptions_for(const GridWorld& g, LaplacianKind kind,
                                          std::size_t count, double gamma) {
  if (count == 0) return {};
  const auto purposes = pvf_sequence(g, kind, (count + 1) / 2);
  return discover_eigenoptions(g, FeatureMap::tabular(g), purposes, gamma);
}

void check_option_count(const GridWorld& g, std::size_t count) {
  if (count % 2 != 0) throw PreconditionError("option counts must be even (sign pairs)");
  if (count > 2 * g.num_states()) {
    throw PreconditionError("option count " + std::to_string(count) + " exceeds 2|S| = " +
                            std::to_string(2 * g.num_states()));
  }
}

State parse_cell(const GridWorld& g, const std::string& text) {
  int row = 0;
  int col = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d%c", &row, &col, &tail) != 2) {
    throw PreconditionError("expected a cell as row,col but got '" + text + "'");
  }
  const auto s = g.state_at({row, col});
  if (!s) throw PreconditionError("cell " + text + " is not a free cell of the map");
  return *s;
}

struct AreaSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

AreaSummary area_summary(const LearningCurve& curve) {
  const auto areas = curve.trial_areas();
  AreaSummary out;
  const double n = static_cast<double>(areas.size());
  out.mean = compensated_sum(areas) / n;
  if (areas.size() > 1) {
    std::vector<double> sq;
    for (double a : areas) sq.push_back((a - out.mean) * (a - out.mean));
    out.std_error = std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
  }
  return out;
}

std::string curve_summary_row(const std::string& name, const LearningCurve& curve) {
  const auto area = area_summary(curve);
  const auto reach = episodes_to_fraction(curve, 0.9);
  return name + "," + format_double(area.mean) + "," + format_double(area.std_error) + "," +
         (reach ? std::to_string(*reach) : std::string("never")) + "," +
         format_double(curve.mean_return.back()) + "\n";
}

Json learn_manifest_fields(const LearnConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"gamma", cfg.gamma},
          {"episodes", cfg.episodes},
          {"episode_len", cfg.episode_len},
          {"trials", cfg.trials},
          {"performance_metric",
           "greedy-policy discounted return gamma^(t-1) from the start state after each episode"}};
}

// --- discover ---------------------------------------------------------------

struct DiscoverArgs {
  Common common;
  std::size_t k = 4;
  double gamma = kDefaultOptionGamma;
};

int cmd_discover(const DiscoverArgs& a, std::ostream& out) {
  const auto m = load(a.common.map);
  const GridWorld& g = m.world;
  const auto purposes = pvf_sequence(g, laplacian_kind(a.common.laplacian), a.k);
  const auto options = discover_eigenoptions(g, FeatureMap::tabular(g), purposes, a.gamma);

  Outputs files(a.common.out_dir);
  files.write("purposes.json", eigenpurposes_to_json(purposes));
  std::ostringstream summary;
  std::vector<double> mean_duration(a.k + 1, 0.0);
  for (const auto& eo : options) {
    const std::string name = option_name(eo.purpose);
    files.write("option_" + name + ".json", eigenoption_to_json(eo));
    files.write("option_" + name + ".txt", render_option(g, eo.option));

    bool doorway = false;
    std::string terminal;
    for (State s = 0; s < g.num_states(); ++s) {
      if (!eo.option.termination[s]) continue;
      terminal += " " + cell_text(g, s);
      doorway = doorway || is_doorway(g, s);
    }
    const double duration = mean_option_duration(g, eo.option);
    mean_duration[eo.purpose.rank] += duration / 2.0;
    summary << name << " eigenvalue=" << format_double(eo.purpose.eigenvalue)
            << " initiation=" << eo.option.initiation_size()
            << " doorway_termination=" << (doorway && eo.option.initiation_size() > 0 ? "yes" : "no")
            << " mean_duration=" << format_double(duration) << " termination:" << terminal << "\n";
  }
  if (a.k >= 4 && mean_duration[4] > 0.0) {
    summary << "termination_frequency_ratio(rank4/rank2)=" << format_double(mean_duration[2] / mean_duration[4])
            << "\n";
  }
  files.write("summary.txt", summary.str());
  out << summary.str();

  Json manifest = base_manifest("discover", m, a.common);
  manifest["k"] = a.k;
  manifest["gamma"] = a.gamma;
  files.finish(std::move(manifest));
  return kSuccess;
}

// --- diffusion --------------------------------------------------------------

struct DiffusionArgs {
  Common common;
  std::size_t options = 64;
  std::size_t mc_walks = 0;
  std::size_t mc_cap = SweepConfig{}.mc_cap;
  double gamma = kDefaultOptionGamma;
  bool ignore_pass_through = false;
};

int cmd_diffusion(const DiffusionArgs& a, std::ostream& out) {
  const auto m = load(a.common.map);
  const GridWorld& g = m.world;
  check_option_count(g, a.options);
  const auto eigen = eigenoptions_for(g, laplacian_kind(a.common.laplacian), a.options, a.gamma);
  const auto ordered = option_prefix(eigen, a.options);

  SweepConfig config;
  config.max_options = a.options;
  config.mc_walks = a.mc_walks;
  config.mc_cap = a.mc_cap;
  config.seed = a.common.seed;
  config.count_pass_through = !a.ignore_pass_through;
  const auto rows = diffusion_sweep(g, ordered, config);
  std::string csv = sweep_to_csv(rows);

  if (const auto bottleneck = try_bottleneck(g)) {
    const DiffusionSpec spec(g, *bottleneck, config.count_pass_through);
    double mc = std::nan("");
    double se = std::nan("");
    if (a.mc_walks > 0) {
      const auto est = diffusion_time_mc(spec, a.mc_walks, a.mc_cap, derive_seed(a.common.seed, a.options + 1));
      mc = est.mean;
      se = est.std_error;
    }
    csv += "bottleneck," + format_double(diffusion_time(spec)) + "," + format_double(mc) + "," +
           format_double(se) + "\n";
  }

  Outputs files(a.common.out_dir);
  files.write("sweep.csv", csv);
  out << csv;

  Json manifest = base_manifest("diffusion", m, a.common);
  manifest["max_options"] = a.options;
  manifest["gamma"] = a.gamma;
  manifest["mc_walks"] = a.mc_walks;
  manifest["mc_cap"] = a.mc_cap;
  manifest["count_pass_through"] = config.count_pass_through;
  files.finish(std::move(manifest));
  return kSuccess;
}

// --- learn ------------------------------------------------------------------

struct LearnArgs {
  Common common;
  std::vector<std::size_t> options{0, 2, 4, 8, 16, 32, 64};
  double gamma = 0.9;
  double option_gamma = kDefaultOptionGamma;
  double alpha = 0.1;
  std::size_t episodes = 500;
  std::size_t episode_len = 100;
  std::size_t trials = 100;
  std::size_t random_orderings = 0;
  std::string start;
  std::string goal;
};

LearnConfig learn_config(double alpha, double gamma, std::size_t episodes,
                         std::size_t episode_len, std::size_t trials) {
  LearnConfig cfg;
  cfg.alpha = alpha;
  cfg.gamma = gamma;
  cfg.episodes = episodes;
  cfg.episode_len = episode_len;
  cfg.trials = trials;
  return cfg;
}

int cmd_learn(const LearnArgs& a, std::ostream& out) {
  const auto m = load(a.common.map);
  const GridWorld& g = m.world;
  LearnConfig cfg = learn_config(a.alpha, a.gamma, a.episodes, a.episode_len, a.trials);
  if (!a.start.empty()) {
    cfg.start = parse_cell(g, a.start);
  } else if (g.start()) {
    cfg.start = *g.start();
  } else {
    throw PreconditionError("the map has no 'S' marker; pass --start row,col");
  }
  if (!a.goal.empty()) {
    cfg.goal = parse_cell(g, a.goal);
  } else if (g.goal()) {
    cfg.goal = *g.goal();
  } else {
    throw PreconditionError("the map has no 'G' marker; pass --goal row,col");
  }
  cfg.validate(g);

  std::vector<std::size_t> counts = a.options;
  for (std::size_t c : counts) check_option_count(g, c);
  const std::size_t most = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  const auto eigen = eigenoptions_for(g, laplacian_kind(a.common.laplacian), most, a.option_gamma);
  const auto ordered = option_prefix(eigen, most);
  const auto curves = option_count_sweep(g, ordered, cfg, counts, a.common.seed);

  Outputs files(a.common.out_dir);
  std::string summary = "configuration,area_mean,area_stderr,episodes_to_90pct,final_return\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string name = "options_" + std::to_string(counts[i]);
    files.write("curve_" + name + ".csv", curve_to_csv(curves[i]));
    summary += curve_summary_row(name, curves[i]);
  }
  if (const auto bottleneck = try_bottleneck(g)) {
    const auto curve = q_learning_with_options(g, *bottleneck, cfg, a.common.seed);
    files.write("curve_bottleneck.csv", curve_to_csv(curve));
    summary += curve_summary_row("bottleneck", curve);
  }
  const auto orderings = random_subgoal_orderings(g, a.random_orderings, derive_seed(a.common.seed, 1));
  for (std::size_t i = 0; i < orderings.size(); ++i) {
    std::vector<Option> random;
    for (std::size_t j = 0; j < std::min(most, orderings[i].size()); ++j) {
      random.push_back(random_subgoal_option(g, orderings[i][j]));
    }
    const auto curve = q_learning_with_options(g, random, cfg, a.common.seed);
    const std::string name = "random_" + std::to_string(i);
    files.write("curve_" + name + ".csv", curve_to_csv(curve));
    summary += curve_summary_row(name, curve);
  }
  files.write("summary.csv", summary);
  out << summary;

  Json manifest = base_manifest("learn", m, a.common);
  manifest["start"] = cell_text(g, cfg.start);
  manifest["goal"] = cell_text(g, cfg.goal);
  manifest["option_counts"] = counts;
  manifest["option_gamma"] = a.option_gamma;
  manifest["random_orderings"] = a.random_orderings;
  manifest["learning"] = learn_manifest_fields(cfg);
  manifest["trial_seeds"] = curves.empty() ? std::vector<std::uint64_t>{} : curves.front().seeds;
  files.finish(std::move(manifest));
  return kSuccess;
}

// --- multitask --------------------------------------------------------------

struct MultitaskArgs {
  Common common;
  std::size_t options = 64;
  double gamma = 0.9;
  double option_gamma = kDefaultOptionGamma;
  double alpha = 0.1;
  std::size_t episodes = 500;
  std::size_t episode_len = 100;
  std::size_t trials = 100;
  std::vector<std::string> tasks;
  bool no_swaps = false;
};

std::vector<Task> default_tasks(const GridWorld& g) {
  std::vector<Task> tasks;
  const std::size_t n = g.num_states();
  if (g.start() && g.goal()) tasks.push_back({*g.start(), *g.goal()});
  tasks.push_back({0, n - 1});
  tasks.push_back({n / 4, (3 * n) / 4});
  return tasks;
}

int cmd_multitask(const MultitaskArgs& a, std::ostream& out) {
  const auto m = load(a.common.map);
  const GridWorld& g = m.world;
  check_option_count(g, a.options);
  LearnConfig cfg = learn_config(a.alpha, a.gamma, a.episodes, a.episode_len, a.trials);

  std::vector<Task> base;
  for (const auto& spec : a.tasks) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw PreconditionError("task must read r,c:r,c, got '" + spec + "'");
    base.push_back({parse_cell(g, spec.substr(0, colon)), parse_cell(g, spec.substr(colon + 1))});
  }
  if (base.empty()) base = default_tasks(g);
  std::vector<Task> tasks;
  for (const Task& t : base) {
    tasks.push_back(t);
    if (!a.no_swaps) tasks.push_back({t.goal, t.start});
  }

  const auto eigen = eigenoptions_for(g, laplacian_kind(a.common.laplacian), a.options, a.option_gamma);
  const auto ordered = option_prefix(eigen, a.options);
  const auto bottleneck = try_bottleneck(g);
  const auto results = multitask_eval(g, ordered, bottleneck ? std::span<const Option>(*bottleneck)
                                                             : std::span<const Option>(),
                                      tasks, cfg, a.common.seed);

  Outputs files(a.common.out_dir);
  std::string summary =
      "task,start,goal,eigen_area,primitives_area,bottleneck_area,wins_vs_primitives,wins_vs_bottleneck\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const std::string prefix = "task_" + std::to_string(i) + "_";
    files.write(prefix + "eigenoptions.csv", curve_to_csv(r.eigenoptions));
    files.write(prefix + "primitives.csv", curve_to_csv(r.primitives));
    if (bottleneck) files.write(prefix + "bottleneck.csv", curve_to_csv(r.bottleneck));
    const auto vs_prim = compare_paired(r.eigenoptions, r.primitives);
    const auto vs_bottleneck = compare_paired(r.eigenoptions, r.bottleneck);
    summary += std::to_string(i) + "," + cell_text(g, r.task.start) + "," + cell_text(g, r.task.goal) + "," +
               format_double(area_summary(r.eigenoptions).mean) + "," +
               format_double(area_summary(r.primitives).mean) + "," +
               (bottleneck ? format_double(area_summary(r.bottleneck).mean) : std::string("nan")) + "," +
               std::to_string(vs_prim.wins) + "/" + std::to_string(vs_prim.trials) + "," +
               (bottleneck ? std::to_string(vs_bottleneck.wins) + "/" + std::to_string(vs_bottleneck.trials)
                           : std::string("nan")) +
               "\n";
  }
  files.write("summary.csv", summary);
  out << summary;

  Json manifest = base_manifest("multitask", m, a.common);
  Json task_list = Json::array();
  for (const Task& t : tasks) task_list.push_back({cell_text(g, t.start), cell_text(g, t.goal)});
  manifest["tasks"] = task_list;
  manifest["options"] = a.options;
  manifest["option_gamma"] = a.option_gamma;
  manifest["learning"] = learn_manifest_fields(cfg);
  files.finish(std::move(manifest));
  return kSuccess;
}

// --- sampled ----------------------------------------------------------------

struct SampledArgs {
  Common common;
  std::string features = "tabular";
  std::string mode = "walk";
  std::size_t budget = 10000;
  std::size_t k = 4;
  std::size_t row_cap = 0;
  bool descending = false;
};

int cmd_sampled(const SampledArgs& a, std::ostream& out) {
  const auto m = load(a.common.map);
  const GridWorld& g = m.world;
  const FeatureMap f = a.features == "synthetic" ? FeatureMap::coordinate_synthetic(g) : FeatureMap::tabular(g);
  SamplingConfig sampling;
  sampling.mode = a.mode == "exhaustive" ? SamplingMode::kExhaustive : SamplingMode::kRandomWalk;
  sampling.budget = a.budget;
  sampling.seed = a.common.seed;
  IncidenceMatrix t = collect_transitions(g, f, sampling);
  if (a.row_cap > 0) t = t.subsample(a.row_cap, derive_seed(a.common.seed, 1));

  const auto purposes = svd_eigenpurposes(t, a.k, a.descending);
  Outputs files(a.common.out_dir);
  files.write("incidence.csv", incidence_to_csv(t, a.common.seed));
  files.write("purposes.json", eigenpurposes_to_json(purposes));

  std::ostringstream summary;
  summary << "rows=" << t.num_rows() << " feature_dim=" << t.feature_dim() << "\n";
  for (const auto& p : purposes) {
    Option greedy;
    greedy.label = "greedy-" + option_name(p);
    greedy.policy.resize(g.num_states());
    greedy.initiation.assign(g.num_states(), false);
    greedy.termination.assign(g.num_states(), false);
    for (State s = 0; s < g.num_states(); ++s) {
      greedy.policy[s] = greedy_option_action(g, f, p, s);
      greedy.initiation[s] = greedy.policy[s] != Action::kTerminate;
      greedy.termination[s] = !greedy.initiation[s];
    }
    files.write("greedy_" + option_name(p) + ".txt", render_option(g, greedy));
    summary << option_name(p) << " singular_value=" << format_double(p.eigenvalue)
            << " initiation=" << greedy.initiation_size() << "\n";
  }
  if (f.kind() == FeatureKind::kTabular && sampling.mode == SamplingMode::kExhaustive && a.row_cap == 0) {
    const double residual =
        gram_laplacian_residual(t.to_dense(), laplacian(build_graph(g), LaplacianKind::kCombinatorial));
    summary << "gram_minus_2L_residual=" << format_double(residual) << "\n";
  }
  files.write("summary.txt", summary.str());
  out << summary.str();

  Json manifest = base_manifest("sampled", m, a.common);
  manifest["features"] = a.features;
  manifest["mode"] = a.mode;
  manifest["budget"] = a.budget;
  manifest["k"] = a.k;
  manifest["row_cap"] = a.row_cap;
  manifest["descending"] = a.descending;
  files.finish(std::move(manifest));
  return kSuccess;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::vector<double> gammas{0.1, 0.5, 0.9, 0.99};
  std::string incidence;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto m = load(a.common.map);
  const GridWorld& g = m.world;
  const FeatureMap f = FeatureMap::tabular(g);
  const auto purposes = pvf_sequence(g, laplacian_kind(a.common.laplacian), g.num_states());
  std::ostringstream report;
  bool ok = true;
  auto line = [&](bool pass, const std::string& name, const std::string& detail) {
    report << (pass ? "PASS " : "FAIL ") << name << " " << detail << "\n";
    ok = ok && pass;
  };

  for (double gamma : a.gammas) {
    std::size_t empty = 0;
    std::size_t capped = 0;
    std::size_t rollouts = 0;
    for (const auto& purpose : purposes) {
      const AugmentedMdp mdp(g, f, purpose, gamma);
      Eigenoption eo;
      try {
        eo = build_eigenoption(mdp, solve_eigenbehavior(mdp));
      } catch (const InvariantError&) {
        ++empty;
        continue;
      }
      for (State s = 0; s < g.num_states(); ++s) {
        if (!eo.option.initiable(s)) continue;
        const auto t = option_trajectory(g, eo.option, s);
        ++rollouts;
        if (t.hit_cap || !eo.option.termination[t.end]) ++capped;
      }
    }
    line(empty == 0 && capped == 0, "termination-nonempty",
         "gamma=" + format_double(gamma) + " purposes=" + std::to_string(purposes.size()) +
             " empty=" + std::to_string(empty) + " rollouts=" + std::to_string(rollouts) +
             " unterminated=" + std::to_string(capped));
  }

  const auto l = laplacian(build_graph(g), LaplacianKind::kCombinatorial);
  Eigen::MatrixXd t;
  std::string source = "exhaustive";
  if (!a.incidence.empty()) {
    t = incidence_from_csv(read_text_file(a.incidence)).rows;
    source = a.incidence;
  } else {
    t = collect_transitions(g, f, {SamplingMode::kExhaustive, 0, a.common.seed}).to_dense();
  }
  const double residual = gram_laplacian_residual(t, l);
  line(residual <= kGramTolerance, "gram-equals-2L",
       "source=" + source + " residual=" + format_double(residual) + " tol=" + format_double(kGramTolerance));

  double worst = 0.0;
  double gap = 0.0;
  const auto checks = compare_laplacian_and_svd(g);
  for (const auto& c : checks) {
    worst = std::max(worst, c.max_angle);
    gap = std::max(gap, c.value_gap);
  }
  line(worst <= kAngleTolerance, "singular-subspaces",
       "groups=" + std::to_string(checks.size()) + " max_angle=" + format_double(worst) +
           " max_value_gap=" + format_double(gap) + " tol=" + format_double(kAngleTolerance));

  Outputs files(a.common.out_dir);
  files.write("report.txt", report.str());
  out << report.str();
  Json manifest = base_manifest("verify", m, a.common);
  manifest["gammas"] = a.gammas;
  manifest["incidence"] = a.incidence;
  manifest["passed"] = ok;
  files.finish(std::move(manifest));
  return ok ? kSuccess : kVerificationFailure;
}

void add_common(CLI::App* sub, Common& c, bool laplacian = true) {
  sub->add_option("--map", c.map, "map file ('X' wall, '.' free, 'S'/'G' markers)")
      ->required()
      ->check(CLI::ExistingFile);
  if (laplacian) {
    sub->add_option("--laplacian", c.laplacian, "graph Laplacian used for the eigenpurposes")
        ->check(CLI::IsMember({"normalized", "combinatorial"}))
        ->capture_default_str();
  }
  sub->add_option("--out-dir", c.out_dir, "directory for output files")->capture_default_str();
  sub->add_option("--seed", c.seed, "base random seed")->capture_default_str();
}

void add_learning(CLI::App* sub, double& alpha, double& gamma, std::size_t& episodes,
                  std::size_t& episode_len, std::size_t& trials, double& option_gamma) {
  sub->add_option("--alpha", alpha, "Q-learning step size")->capture_default_str();
  sub->add_option("--gamma", gamma, "Q-learning discount")->capture_default_str();
  sub->add_option("--option-gamma", option_gamma, "discount used to solve the eigenoptions")
      ->capture_default_str();
  sub->add_option("--episodes", episodes, "episodes per trial")->capture_default_str();
  sub->add_option("--episode-len", episode_len, "primitive steps per episode")->capture_default_str();
  sub->add_option("--trials", trials, "independent trials")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral option discovery on gridworlds", args.empty() ? "eigenopt" : args.front()};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  DiscoverArgs discover;
  auto* sub_discover = app.add_subcommand("discover", "solve eigenoptions and render them");
  add_common(sub_discover, discover.common);
  sub_discover->add_option("--k", discover.k, "number of eigenvectors (2k options)")->capture_default_str();
  sub_discover->add_option("--gamma", discover.gamma, "option discount")->capture_default_str();

  DiffusionArgs diffusion;
  auto* sub_diffusion = app.add_subcommand("diffusion", "diffusion time as eigenoptions are added");
  add_common(sub_diffusion, diffusion.common);
  sub_diffusion->add_option("--options", diffusion.options, "largest option count (even)")->capture_default_str();
  sub_diffusion->add_option("--mc-walks", diffusion.mc_walks, "Monte Carlo walks per row (0 = exact only)")
      ->capture_default_str();
  sub_diffusion->add_option("--mc-cap", diffusion.mc_cap, "step cap per Monte Carlo walk")->capture_default_str();
  sub_diffusion->add_option("--gamma", diffusion.gamma, "option discount")->capture_default_str();
  sub_diffusion->add_flag("--ignore-pass-through", diffusion.ignore_pass_through,
                          "count arrival only where an option ends");

  LearnArgs learn;
  auto* sub_learn = app.add_subcommand("learn", "Q-learning curves for several option counts");
  add_common(sub_learn, learn.common);
  sub_learn->add_option("--options", learn.options, "option counts, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  add_learning(sub_learn, learn.alpha, learn.gamma, learn.episodes, learn.episode_len, learn.trials,
               learn.option_gamma);
  sub_learn->add_option("--start", learn.start, "start cell row,col (default: the 'S' marker)");
  sub_learn->add_option("--goal", learn.goal, "goal cell row,col (default: the 'G' marker)");
  sub_learn->add_option("--random-orderings", learn.random_orderings,
                        "random-subgoal baselines, one per ordering")
      ->capture_default_str();

  MultitaskArgs multitask;
  auto* sub_multitask = app.add_subcommand("multitask", "one option set across several start/goal tasks");
  add_common(sub_multitask, multitask.common);
  sub_multitask->add_option("--options", multitask.options, "eigenoption count (even)")->capture_default_str();
  add_learning(sub_multitask, multitask.alpha, multitask.gamma, multitask.episodes, multitask.episode_len,
               multitask.trials, multitask.option_gamma);
  sub_multitask->add_option("--task", multitask.tasks, "task as r,c:r,c (repeatable)");
  sub_multitask->add_flag("--no-swaps", multitask.no_swaps, "skip the swapped start/goal tasks");

  SampledArgs sampled;
  auto* sub_sampled = app.add_subcommand("sampled", "eigenpurposes from sampled transitions");
  add_common(sub_sampled, sampled.common, false);
  sub_sampled->add_option("--features", sampled.features, "feature map")
      ->check(CLI::IsMember({"tabular", "synthetic"}))
      ->capture_default_str();
  sub_sampled->add_option("--mode", sampled.mode, "sampling mode")
      ->check(CLI::IsMember({"walk", "exhaustive"}))
      ->capture_default_str();
  sub_sampled->add_option("--budget", sampled.budget, "random-walk steps")->capture_default_str();
  sub_sampled->add_option("--k", sampled.k, "number of singular vectors (2k purposes)")->capture_default_str();
  sub_sampled->add_option("--row-cap", sampled.row_cap, "keep at most this many rows (0 = all)")
      ->capture_default_str();
  sub_sampled->add_flag("--descending", sampled.descending, "largest singular values first");

  VerifyArgs verify;
  auto* sub_verify = app.add_subcommand("verify", "check the structural guarantees on a map");
  add_common(sub_verify, verify.common);
  sub_verify->add_option("--gammas", verify.gammas, "option discounts to test")
      ->delimiter(',')
      ->capture_default_str();
  sub_verify->add_option("--incidence", verify.incidence, "incidence CSV to check instead of exhaustive sampling")
      ->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*sub_discover) return cmd_discover(discover, out);
    if (*sub_diffusion) return cmd_diffusion(diffusion, out);
    if (*sub_learn) return cmd_learn(learn, out);
    if (*sub_multitask) return cmd_multitask(multitask, out);
    if (*sub_sampled) return cmd_sampled(sampled, out);
    if (*sub_verify) return cmd_verify(verify, out);
  } catch (const ParseError& e) {
    err << "error: map: " << e.what() << "\n";
    return kUsageError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const InvariantError& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace eigenopt::cli
