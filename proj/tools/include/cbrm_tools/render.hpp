#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbrm/cbr_model.hpp"
#include "cbrm/matrix.hpp"
#include "cbrm/rational.hpp"

namespace cbrm::cli {

using Json = nlohmann::ordered_json;

/// "1/3 (0.333333)"
std::string exact_and_decimal(const Rational& r);

/// {"fraction": "1/3", "decimal": "0.333333"}
Json rational_json(const Rational& r);
Json rational_row_json(const std::vector<Rational>& row);
Json matrix_json(const Matrix& m, const std::vector<std::string>& row_labels,
                 const std::vector<std::string>& col_labels);

struct Style {
  bool color = false;
  std::string heading(const std::string& text) const;
};

/// Left-aligned columns separated by two spaces. The first row is the header.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows);

void print_matrix(std::ostream& out, const Matrix& m,
                  const std::vector<std::string>& row_labels,
                  const std::vector<std::string>& col_labels);

/// N with R1..R3 labels, the row sums t, and what n_ij means.
/// Throws NonAbsorbing.
std::string render_fundamental(const CbrParameters& p, const Style& style = {});

}  // namespace cbrm::cli
