#include "cbrm_tools/render.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "cbrm/errors.hpp"
#include "cbrm/markov_chain.hpp"

namespace cbrm::cli {

std::string exact_and_decimal(const Rational& r) {
  return to_fraction(r) + " (" + to_decimal(r) + ")";
}

Json rational_json(const Rational& r) {
  return {{"fraction", to_fraction(r)}, {"decimal", to_decimal(r)}};
}

Json rational_row_json(const std::vector<Rational>& row) {
  Json out = Json::array();
  for (const auto& r : row) out.push_back(rational_json(r));
  return out;
}

Json matrix_json(const Matrix& m, const std::vector<std::string>& row_labels,
                 const std::vector<std::string>& col_labels) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(rational_row_json(m.row(i)));
  return {{"row_states", row_labels}, {"col_states", col_labels}, {"rows", std::move(rows)}};
}

std::string Style::heading(const std::string& text) const {
  return color ? "\033[1m" + text + "\033[0m" : text;
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (row.size() > width.size()) width.resize(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  }
  for (const auto& row : rows) {
    std::string line = "  ";
    for (std::size_t j = 0; j < row.size(); ++j) {
      line += row[j];
      if (j + 1 < row.size()) line += std::string(width[j] - row[j].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

void print_matrix(std::ostream& out, const Matrix& m,
                  const std::vector<std::string>& row_labels,
                  const std::vector<std::string>& col_labels) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  header.insert(header.end(), col_labels.begin(), col_labels.end());
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> r{row_labels[i]};
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(exact_and_decimal(m(i, j)));
    rows.push_back(std::move(r));
  }
  print_table(out, rows);
}

std::string render_fundamental(const CbrParameters& p, const Style& style) {
  if (!p.is_absorbing()) {
    throw Error(ErrorCode::NonAbsorbing, "p34 = 0, the fundamental matrix does not exist");
  }
  const CanonicalChain chain = canonical_form(cbr_transition_matrix(p));
  const Matrix& n = chain.fundamental();
  const std::vector<Rational> sums = n.row_sums();
  const auto labels = chain.transient_states();

  std::ostringstream out;
  out << style.heading("Fundamental matrix N = (I - Q)^-1") << '\n';
  out << "  n_ij = mean number of times in state Rj when started in Ri\n";
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  header.insert(header.end(), labels.begin(), labels.end());
  header.push_back("row sum");
  rows.push_back(std::move(header));
  for (std::size_t i = 0; i < n.rows(); ++i) {
    std::vector<std::string> r{labels[i]};
    for (std::size_t j = 0; j < n.cols(); ++j) r.push_back(exact_and_decimal(n(i, j)));
    r.push_back(exact_and_decimal(sums[i]));
    rows.push_back(std::move(r));
  }
  print_table(out, rows);
  return out.str();
}

}  // namespace cbrm::cli
