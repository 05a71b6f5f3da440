#include "cbrm/trajectory_io.hpp"

#include <fstream>
#include <sstream>

#include "cbrm/errors.hpp"

namespace cbrm {

namespace {

std::vector<std::string> split_labels(const std::string& line) {
  std::vector<std::string> out;
  std::string current;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace

std::vector<Trajectory> parse_trajectories(std::istream& in) {
  std::vector<Trajectory> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto labels = split_labels(line);
    if (labels.empty()) {
      // A line of bare separators has no labels at all.
      throw Error(ErrorCode::InvalidTrajectory,
                  "line " + std::to_string(line_no) + ": EmptyTrajectory");
    }
    try {
      out.push_back(validate_trajectory(std::span<const std::string>(labels)));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidTrajectory,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Trajectory> parse_trajectories_text(const std::string& text) {
  std::istringstream in(text);
  return parse_trajectories(in);
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  return parse_trajectories(in);
}

void write_trajectories(std::ostream& out, std::span<const Trajectory> trajectories) {
  for (const auto& t : trajectories) {
    bool first = true;
    for (Step s : t.phases()) {
      if (!first) out << ", ";
      out << label(s);
      first = false;
    }
    out << '\n';
  }
}

std::string format_trajectories(std::span<const Trajectory> trajectories) {
  std::ostringstream out;
  write_trajectories(out, trajectories);
  return out.str();
}

}  // namespace cbrm
