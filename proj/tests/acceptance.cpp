// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eigenopt/diffusion.hpp"
#include "eigenopt/errors.hpp"
#include "eigenopt/features.hpp"
#include "eigenopt/io.hpp"
#include "eigenopt/learn.hpp"
#include "eigenopt/options.hpp"
#include "eigenopt/rng.hpp"
#include "eigenopt/sampled.hpp"
#include "eigenopt/spectral.hpp"
#include "eigenopt/summation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace eigenopt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<GridWorld> canonical_maps() {
  std::vector<GridWorld> maps;
  for (const auto& name : fixtures::kCanonicalMaps) maps.push_back(load_map(fixtures::map_path(name)));
  return maps;
}

std::string fmt(double x, int digits = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, x);
  return buffer;
}

std::vector<Eigenoption> four_room_eigenoptions(const GridWorld& g, std::size_t count) {
  const auto purposes = pvf_sequence(g, LaplacianKind::kNormalized, count / 2);
  return discover_eigenoptions(g, FeatureMap::tabular(g), purposes);
}

std::vector<Option> random_options(const GridWorld& g, const std::vector<State>& order, std::size_t count) {
  std::vector<Option> out;
  for (std::size_t i = 0; i < count && i < order.size(); ++i) out.push_back(random_subgoal_option(g, order[i]));
  return out;
}

double mean_area(const LearningCurve& c) {
  const auto areas = c.trial_areas();
  return compensated_sum(areas) / static_cast<double>(areas.size());
}

LearnConfig four_room_learning(const GridWorld& g) {
  LearnConfig cfg;
  cfg.alpha = 0.1;
  cfg.gamma = 0.9;
  cfg.episodes = 500;
  cfg.episode_len = 100;
  cfg.trials = 100;
  cfg.start = *g.start();
  cfg.goal = *g.goal();
  return cfg;
}

constexpr std::uint64_t kSeed = 0;

// 1. Exhaustive tabular sampling reproduces twice the combinatorial Laplacian.
Verdict gram_identity() {
  double worst = 0.0;
  for (const auto& g : canonical_maps()) {
    const auto t = collect_transitions(g, FeatureMap::tabular(g), {.mode = SamplingMode::kExhaustive});
    worst = std::max(worst, gram_laplacian_residual(t.to_dense(),
                                                    laplacian(build_graph(g), LaplacianKind::kCombinatorial)));
  }
  return {worst <= 1e-9, "max |T^T T - 2L| = " + fmt(worst) + " (tol 1e-9)"};
}

// 2. Laplacian eigenspaces equal right-singular subspaces of T.
Verdict subspace_equivalence() {
  double worst = 0.0;
  std::size_t groups = 0;
  for (const auto& g : canonical_maps()) {
    for (const auto& c : compare_laplacian_and_svd(g)) {
      worst = std::max(worst, c.max_angle);
      ++groups;
    }
  }
  return {worst <= 1e-6, std::to_string(groups) + " eigenspaces, max principal angle " + fmt(worst) +
                             " rad (tol 1e-6)"};
}

// 3. Every eigenoption terminates somewhere and every rollout reaches it.
Verdict termination_property() {
  std::size_t options = 0;
  std::size_t empty = 0;
  std::size_t rollouts = 0;
  std::size_t failed = 0;
  for (const auto& g : canonical_maps()) {
    const auto f = FeatureMap::tabular(g);
    const auto purposes = pvf_sequence(g, LaplacianKind::kNormalized, g.num_states());
    for (double gamma : {0.1, 0.5, 0.9, 0.99}) {
      for (const auto& p : purposes) {
        ++options;
        const AugmentedMdp m(g, f, p, gamma);
        Eigenoption eo;
        try {
          eo = build_eigenoption(m, solve_eigenbehavior(m));
        } catch (const InvariantError&) {
          ++empty;
          continue;
        }
        for (State s = 0; s < g.num_states(); ++s) {
          if (!eo.option.initiable(s)) continue;
          ++rollouts;
          const auto t = option_trajectory(g, eo.option, s);
          if (t.hit_cap || !eo.option.termination[t.end]) ++failed;
        }
      }
    }
  }
  return {empty == 0 && failed == 0, std::to_string(options) + " options, " + std::to_string(empty) +
                                         " with empty termination set, " + std::to_string(rollouts) +
                                         " rollouts, " + std::to_string(failed) + " failed to terminate"};
}

// 4. Policy iteration against exhaustive search on every connected map of at
// most 8 cells.
Verdict solver_oracle() {
  const auto maps = oracle::free_polyomino_maps(8);
  double worst = 0.0;
  double worst_literal = 0.0;
  std::size_t solves = 0;
  std::size_t literal = 0;
  for (const auto& text : maps) {
    const auto g = parse_map(text);
    const auto f = FeatureMap::tabular(g);
    std::vector<Eigenpurpose> purposes;
    if (g.num_states() == 1) {
      Eigenpurpose p;
      p.vector = Eigen::VectorXd::Ones(1);
      purposes = {p, p};
      purposes[1].vector *= -1.0;
    } else {
      purposes = pvf_sequence(g, LaplacianKind::kNormalized, g.num_states());
    }
    for (const auto& p : purposes) {
      for (double gamma : {0.5, 0.9}) {
        const AugmentedMdp m(g, f, p, gamma);
        const QTable q = solve_eigenbehavior(m);
        const auto values = oracle::optimal_values_by_rollouts(g, f, p.vector, gamma);
        worst = std::max(worst, (q - oracle::q_from_values(g, f, p.vector, gamma, values)).cwiseAbs().maxCoeff());
        ++solves;
        if (g.num_states() <= 6) {
          const auto by_policies = oracle::optimal_values_by_policies(g, f, p.vector, gamma);
          worst_literal = std::max(
              worst_literal, (q - oracle::q_from_values(g, f, p.vector, gamma, by_policies)).cwiseAbs().maxCoeff());
          ++literal;
        }
      }
    }
  }
  const double overall = std::max(worst, worst_literal);
  return {maps.size() == 533 && overall <= 1e-8,
          std::to_string(maps.size()) + " maps, " + std::to_string(solves) + " solves, max |q - q*| = " +
              fmt(worst) + " vs trajectory enumeration; " + std::to_string(literal) +
              " solves on <= 6 cells vs literal 5^|S| policy enumeration: " + fmt(worst_literal) + " (tol 1e-8)"};
}

// 5. Diffusion time as eigenoptions are added.
Verdict diffusion_shape() {
  const auto g = fixtures::four_room();
  const auto ordered = option_prefix(four_room_eigenoptions(g, 64), 64);
  const auto rows = diffusion_sweep(g, ordered, {.max_options = 64, .mc_walks = 100'000, .seed = kSeed});
  const auto bottleneck = bottleneck_options(g);
  const DiffusionSpec bspec(g, bottleneck);
  const double d_bottleneck = diffusion_time(bspec);
  const auto mc_bottleneck = diffusion_time_mc(bspec, 100'000, 100'000'000, derive_seed(kSeed, 65));

  auto at = [&](std::size_t count) { return rows[count / 2].diffusion_time; };
  const double d0 = at(0);
  double worst_z = std::abs(d_bottleneck - mc_bottleneck.mean) / mc_bottleneck.std_error;
  for (const auto& r : rows) worst_z = std::max(worst_z, std::abs(r.diffusion_time - r.mc_estimate) / r.mc_stderr);
  const bool shape = at(2) > d0 && at(4) > d0 && at(64) < d0 && d_bottleneck > d0;
  return {shape && worst_z <= 3.0,
          "D(0)=" + fmt(d0) + " D(2)=" + fmt(at(2)) + " D(4)=" + fmt(at(4)) + " D(64)=" + fmt(at(64)) +
              " D(bottleneck)=" + fmt(d_bottleneck) + "; worst |exact - MC| = " + fmt(worst_z, 3) +
              " stderr over " + std::to_string(rows.size() + 1) + " option sets (tol 3)"};
}

// 6. Learning speed with 64 eigenoptions against primitives only.
Verdict learning_benefit() {
  const auto g = fixtures::four_room();
  const auto ordered = option_prefix(four_room_eigenoptions(g, 64), 64);
  const auto cfg = four_room_learning(g);
  const auto eigen = q_learning_with_options(g, ordered, cfg, kSeed);
  const auto primitive = q_learning_with_options(g, {}, cfg, kSeed);
  const auto e90 = episodes_to_fraction(eigen, 0.9);
  const auto p90 = episodes_to_fraction(primitive, 0.9);
  const auto cmp = compare_paired(eigen, primitive);
  const bool faster = e90 && p90 && 2 * *e90 <= *p90;
  return {faster && cmp.wins >= 80,
          "episodes to 0.9 x final: eigenoptions " + (e90 ? std::to_string(*e90) : "never") + ", primitives " +
              (p90 ? std::to_string(*p90) : "never") + "; area wins " + std::to_string(cmp.wins) + "/" +
              std::to_string(cmp.trials) + " (need >= 80)"};
}

// 7. Random subgoal options as a baseline.
Verdict random_baseline() {
  const auto g = fixtures::four_room();
  const auto ordered = option_prefix(four_room_eigenoptions(g, 64), 64);
  const auto cfg = four_room_learning(g);
  const double d_eigen = diffusion_time(DiffusionSpec(g, ordered));
  const double a_eigen = mean_area(q_learning_with_options(g, ordered, cfg, kSeed));

  const auto orderings = random_subgoal_orderings(g, 24, derive_seed(kSeed, 1));
  std::vector<double> d_random;
  std::vector<double> a_random;
  std::size_t diffusion_beats = 0;
  std::size_t area_beats = 0;
  std::ostringstream per;
  for (std::size_t i = 0; i < orderings.size(); ++i) {
    const auto options = random_options(g, orderings[i], 64);
    d_random.push_back(diffusion_time(DiffusionSpec(g, options)));
    a_random.push_back(mean_area(q_learning_with_options(g, options, cfg, kSeed)));
    if (d_random.back() < d_eigen) ++diffusion_beats;
    if (a_random.back() > a_eigen) ++area_beats;
    per << "    ordering " << i << ": diffusion " << fmt(d_random.back()) << ", area " << fmt(a_random.back())
        << "\n";
  }
  const double d_mean = compensated_sum(d_random) / 24.0;
  const double a_mean = compensated_sum(a_random) / 24.0;
  return {d_mean > d_eigen && a_mean < a_eigen,
          "diffusion: random mean " + fmt(d_mean) + " vs eigen " + fmt(d_eigen) + "; area: random mean " +
              fmt(a_mean) + " vs eigen " + fmt(a_eigen) + "; orderings beating eigenoptions: " +
              std::to_string(diffusion_beats) + "/24 on diffusion, " + std::to_string(area_beats) +
              "/24 on area (recorded, not gated)\n" + per.str()};
}

// 8. One option set across several tasks and their swaps.
Verdict multitask() {
  const auto g = fixtures::four_room();
  const auto ordered = option_prefix(four_room_eigenoptions(g, 64), 64);
  const auto bottleneck = bottleneck_options(g);
  const std::size_t n = g.num_states();
  const std::vector<Task> base = {{*g.start(), *g.goal()}, {0, n - 1}, {n / 4, 3 * n / 4}};
  std::vector<Task> tasks;
  for (const Task& t : base) {
    tasks.push_back(t);
    tasks.push_back({t.goal, t.start});
  }
  const auto results = multitask_eval(g, ordered, bottleneck, tasks, four_room_learning(g), kSeed);
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto cmp = compare_paired(r.eigenoptions, r.primitives);
    ok = ok && cmp.wins >= 70;
    detail << "    task " << i << " " << g.cell(r.task.start).row << "," << g.cell(r.task.start).col << " -> "
           << g.cell(r.task.goal).row << "," << g.cell(r.task.goal).col << ": wins vs primitives " << cmp.wins
           << "/" << cmp.trials << ", eigen area " << fmt(mean_area(r.eigenoptions)) << "\n";
  }
  for (std::size_t i = 0; i < results.size(); i += 2) {
    const auto swap = compare_paired(results[i].eigenoptions, results[i + 1].eigenoptions);
    const bool close = std::abs(swap.mean_difference) < 2.0 * swap.std_error;
    ok = ok && close;
    const auto prim = compare_paired(results[i].primitives, results[i + 1].primitives);
    detail << "    swap " << i << "/" << i + 1 << ": eigen area difference " << fmt(swap.mean_difference, 4)
           << " +- " << fmt(swap.std_error, 4) << (close ? "" : " (exceeds 2 stderr)")
           << "; primitives-only difference " << fmt(prim.mean_difference, 4) << " +- " << fmt(prim.std_error, 4)
           << "\n";
  }
  return {ok, std::to_string(results.size()) + " tasks (>= 70/100 wins each, swap difference < 2 paired stderr)\n" +
                  detail.str()};
}

// 9. Doorway termination among the first eigenoptions.
Verdict doorway_rank() {
  const auto g = fixtures::four_room();
  const auto f = FeatureMap::tabular(g);
  const auto purposes = pvf_sequence(g, LaplacianKind::kNormalized, g.num_states());
  const auto options = discover_eigenoptions(g, f, purposes);
  auto doorway_hits = [&](const Eigenoption& eo) {
    std::size_t hits = 0;
    if (eo.option.initiation_size() == 0) return hits;
    for (State s = 0; s < g.num_states(); ++s) hits += eo.option.termination[s] && is_doorway(g, s);
    return hits;
  };
  std::ostringstream detail;
  bool first_four_clear = true;
  for (std::size_t i = 0; i < 8; ++i) {
    const std::size_t hits = doorway_hits(options[i]);
    first_four_clear = first_four_clear && hits == 0;
    if (hits > 0) detail << options[i].option.label << " terminates in " << hits << " doorway(s); ";
  }
  std::string first = "none";
  for (const auto& eo : options) {
    if (doorway_hits(eo) > 0) {
      first = eo.option.label;
      break;
    }
  }
  std::string first_later = "none";
  for (std::size_t i = 8; i < options.size(); ++i) {
    if (doorway_hits(options[i]) > 0) {
      first_later = options[i].option.label;
      break;
    }
  }

  const auto comb = pvf_sequence(g, LaplacianKind::kCombinatorial, g.num_states());
  const auto comb_options = discover_eigenoptions(g, f, comb);
  std::string comb_first = "none";
  for (const auto& eo : comb_options) {
    if (doorway_hits(eo) > 0) {
      comb_first = eo.option.label;
      break;
    }
  }
  detail << "first doorway-terminating option " << first << ", first beyond rank 4 " << first_later
         << "; combinatorial Laplacian: " << comb_first;
  return {first_four_clear, detail.str()};
}

// 10. Relative timescales of the second and fourth eigenoptions.
Verdict timescale_ratio() {
  const auto g = fixtures::open_grid();
  const auto options = discover_eigenoptions(g, FeatureMap::tabular(g),
                                             pvf_sequence(g, LaplacianKind::kNormalized, 4));
  const double d2 = 0.5 * (mean_option_duration(g, options[2].option) + mean_option_duration(g, options[3].option));
  const double d4 = 0.5 * (mean_option_duration(g, options[6].option) + mean_option_duration(g, options[7].option));
  const double ratio = d2 / d4;
  return {ratio >= 1.5 && ratio <= 2.5, "mean duration rank 2 " + fmt(d2) + ", rank 4 " + fmt(d4) +
                                            "; termination-frequency ratio " + fmt(ratio) + " (need [1.5, 2.5])"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gram identity", 1.0, gram_identity},
      {2, "eigenspace equivalence", 5.0, subspace_equivalence},
      {3, "termination property", 120.0, termination_property},
      {4, "solver oracle", 60.0, solver_oracle},
      {5, "diffusion shape", 300.0, diffusion_shape},
      {6, "learning benefit", 600.0, learning_benefit},
      {7, "random-option baseline", 900.0, random_baseline},
      {8, "multi-task", 1200.0, multitask},
      {9, "doorway rank", 0.0, doorway_rank},
      {10, "timescale ratio", 0.0, timescale_ratio},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds == 0.0 || seconds < c.budget_seconds;
    const bool pass = v.pass && in_time;
    failures += !pass;
    std::string timing = fmt(seconds, 3) + " s";
    if (c.budget_seconds > 0.0) timing += " of " + fmt(c.budget_seconds, 4) + " s";
    std::printf("criterion %2d %-24s %s  [%s] %s\n", c.id, c.name, pass ? "PASS" : "FAIL", timing.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
