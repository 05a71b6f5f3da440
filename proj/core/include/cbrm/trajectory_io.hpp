#pragma once

// Plain-text trajectory files: one trajectory per line, labels separated by
// commas and/or whitespace, '#' starts a comment line, blank lines ignored.
//
//   # physician example
//   R1, R2, R3, R1, R2, R3, R3, R4
//   R1 R2 R3 R4

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cbrm/cbr_model.hpp"

namespace cbrm {

/// Throws Error(InvalidTrajectory) naming the line and the underlying error.
std::vector<Trajectory> parse_trajectories(std::istream& in);
std::vector<Trajectory> parse_trajectories_text(const std::string& text);
/// Throws ParseError if the file cannot be opened.
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);

void write_trajectories(std::ostream& out, std::span<const Trajectory> trajectories);
std::string format_trajectories(std::span<const Trajectory> trajectories);

}  // namespace cbrm
