#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "eigenopt/diffusion.hpp"
#include "eigenopt/grid_world.hpp"
#include "eigenopt/learn.hpp"
#include "eigenopt/options.hpp"
#include "eigenopt/sampled.hpp"
#include "eigenopt/spectral.hpp"

namespace eigenopt {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

std::uint64_t fnv1a64(std::string_view bytes);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// [{"rank":..,"eigenvalue":..,"sign":..,"vector":[..]}, ...]
std::string eigenpurposes_to_json(std::span<const Eigenpurpose> purposes);

/// {"purpose_rank","sign","gamma","policy","initiation","termination","q"};
/// policy entries are action names, initiation/termination are state lists.
std::string eigenoption_to_json(const Eigenoption& o);

struct OptionRecord {
  std::size_t purpose_rank = 0;
  int sign = 1;
  double gamma = 0.0;
  std::vector<Action> policy;
  std::vector<State> initiation;
  std::vector<State> termination;
  std::vector<std::array<double, kNumAugmentedActions>> q;

  Option to_option() const;
};
OptionRecord option_record_from_json(std::string_view json);

/// One character per cell: arrows ^ v > < for moves, 'T' where the option
/// terminates, '#' for walls, '.' for states outside I and T.
std::string render_option(const GridWorld& g, const Option& o);

/// Header line "feature_dim=<d>,seed=<s>", then one comma-separated row per
/// stored difference.
std::string incidence_to_csv(const IncidenceMatrix& t, std::uint64_t seed);

struct IncidenceCsv {
  std::size_t feature_dim = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd rows;  // as stored; duplicates are kept
};
IncidenceCsv incidence_from_csv(std::string_view text);

/// option_count,diffusion_time,mc_estimate,mc_stderr
std::string sweep_to_csv(std::span<const SweepRow> rows);

/// episode,mean_return,stderr
std::string curve_to_csv(const LearningCurve& curve);

}  // namespace eigenopt
