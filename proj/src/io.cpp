#include "eigenopt/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "eigenopt/errors.hpp"

namespace eigenopt {

namespace {

std::vector<State> members(const std::vector<bool>& set) {
  std::vector<State> out;
  for (State s = 0; s < set.size(); ++s) {
    if (set[s]) out.push_back(s);
  }
  return out;
}

template <typename Range, typename Format>
void append_array(std::string& out, const Range& values, Format format) {
  out += '[';
  bool first = true;
  for (const auto& v : values) {
    if (!first) out += ',';
    first = false;
    out += format(v);
  }
  out += ']';
}

std::string_view next_line(std::string_view& text) {
  const auto end = text.find('\n');
  std::string_view line = text.substr(0, end);
  text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_double(std::string_view field, std::size_t line) {
  const std::string s(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw PreconditionError("incidence CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw PreconditionError("failed writing " + path.string());
}

std::string eigenpurposes_to_json(std::span<const Eigenpurpose> purposes) {
  std::string out = "[";
  for (std::size_t i = 0; i < purposes.size(); ++i) {
    const auto& p = purposes[i];
    if (i > 0) out += ",\n ";
    out += "{\"rank\":" + std::to_string(p.rank) + ",\"eigenvalue\":" + format_double(p.eigenvalue) +
           ",\"sign\":" + std::to_string(p.sign) + ",\"vector\":";
    append_array(out, std::span<const double>(p.vector.data(), static_cast<std::size_t>(p.vector.size())),
                 format_double);
    out += '}';
  }
  out += "]\n";
  return out;
}

std::string eigenoption_to_json(const Eigenoption& o) {
  auto quoted_action = [](Action a) { return "\"" + std::string(action_name(a)) + "\""; };
  auto state = [](State s) { return std::to_string(s); };
  std::string out = "{\"purpose_rank\":" + std::to_string(o.purpose.rank) +
                    ",\"sign\":" + std::to_string(o.purpose.sign) +
                    ",\"gamma\":" + format_double(o.gamma) + ",\n \"policy\":";
  append_array(out, o.option.policy, quoted_action);
  out += ",\n \"initiation\":";
  append_array(out, members(o.option.initiation), state);
  out += ",\n \"termination\":";
  append_array(out, members(o.option.termination), state);
  out += ",\n \"q\":[";
  for (Eigen::Index s = 0; s < o.q.rows(); ++s) {
    if (s > 0) out += ",\n  ";
    append_array(out, std::span<const double>(o.q.row(s).data(), kNumAugmentedActions), format_double);
  }
  out += "]}\n";
  return out;
}

Option OptionRecord::to_option() const {
  const std::size_t n = policy.size();
  Option o;
  o.label = "eigenoption-r" + std::to_string(purpose_rank) + (sign > 0 ? "+" : "-");
  o.policy = policy;
  o.initiation.assign(n, false);
  o.termination.assign(n, false);
  for (State s : initiation) o.initiation.at(s) = true;
  for (State s : termination) o.termination.at(s) = true;
  return o;
}

OptionRecord option_record_from_json(std::string_view json) {
  OptionRecord r;
  try {
    const auto j = nlohmann::json::parse(json);
    r.purpose_rank = j.at("purpose_rank").get<std::size_t>();
    r.sign = j.at("sign").get<int>();
    r.gamma = j.at("gamma").get<double>();
    for (const auto& name : j.at("policy")) {
      const auto a = parse_action(name.get<std::string>());
      if (!a) throw PreconditionError("option JSON: unknown action " + name.get<std::string>());
      r.policy.push_back(*a);
    }
    r.initiation = j.at("initiation").get<std::vector<State>>();
    r.termination = j.at("termination").get<std::vector<State>>();
    for (const auto& row : j.at("q")) r.q.push_back(row.get<std::array<double, kNumAugmentedActions>>());
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("option JSON: ") + e.what());
  }
  for (State s : r.initiation) {
    if (s >= r.policy.size()) throw PreconditionError("option JSON: initiation state out of range");
  }
  for (State s : r.termination) {
    if (s >= r.policy.size()) throw PreconditionError("option JSON: termination state out of range");
  }
  return r;
}

std::string render_option(const GridWorld& g, const Option& o) {
  std::string out;
  for (int row = 0; row < g.height(); ++row) {
    for (int col = 0; col < g.width(); ++col) {
      const auto s = g.state_at({row, col});
      if (!s) {
        out += '#';
      } else if (o.termination[*s] || (o.initiation[*s] && o.policy[*s] == Action::kTerminate)) {
        out += 'T';
      } else if (o.initiation[*s]) {
        switch (o.policy[*s]) {
          case Action::kUp: out += '^'; break;
          case Action::kDown: out += 'v'; break;
          case Action::kRight: out += '>'; break;
          case Action::kLeft: out += '<'; break;
          case Action::kTerminate: out += 'T'; break;
        }
      } else {
        out += '.';
      }
    }
    out += '\n';
  }
  return out;
}

std::string incidence_to_csv(const IncidenceMatrix& t, std::uint64_t seed) {
  std::string out = "feature_dim=" + std::to_string(t.feature_dim()) + ",seed=" + std::to_string(seed) + "\n";
  for (const auto& row : t.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

IncidenceCsv incidence_from_csv(std::string_view text) {
  IncidenceCsv out;
  const std::string header(next_line(text));
  unsigned long long dim = 0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(), "feature_dim=%llu,seed=%llu", &dim, &seed) != 2 || dim == 0) {
    throw PreconditionError("incidence CSV: header must read feature_dim=<d>,seed=<s>");
  }
  out.feature_dim = dim;
  out.seed = seed;

  std::vector<std::vector<double>> rows;
  std::size_t line_number = 1;
  while (!text.empty()) {
    std::string_view line = next_line(text);
    ++line_number;
    if (line.empty()) continue;
    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      row.push_back(parse_double(line.substr(0, comma), line_number));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (row.size() != out.feature_dim) {
      throw PreconditionError("incidence CSV line " + std::to_string(line_number) + ": expected " +
                              std::to_string(out.feature_dim) + " fields, got " +
                              std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  out.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.feature_dim));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < out.feature_dim; ++c) {
      out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return out;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "option_count,diffusion_time,mc_estimate,mc_stderr\n";
  for (const auto& r : rows) {
    out += std::to_string(r.option_count) + "," + format_double(r.diffusion_time) + "," +
           format_double(r.mc_estimate) + "," + format_double(r.mc_stderr) + "\n";
  }
  return out;
}

std::string curve_to_csv(const LearningCurve& curve) {
  std::string out = "episode,mean_return,stderr\n";
  for (std::size_t e = 0; e < curve.episodes(); ++e) {
    out += std::to_string(e + 1) + "," + format_double(curve.mean_return[e]) + "," +
           format_double(curve.std_error[e]) + "\n";
  }
  return out;
}

}  // namespace eigenopt
