#include "fscre/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fscre/errors.hpp"

namespace fscre {

void Dataset::validate() const {
  if (y.size() != x.rows()) {
    throw ShapeMismatch("dataset: y has " + std::to_string(y.size()) + " entries but X has " +
                        std::to_string(x.rows()) + " rows");
  }
  if (!truth) return;
  if (truth->beta.size() != x.cols()) throw ShapeMismatch("dataset: beta length differs from p");
  if (truth->mask_x.rows() != x.rows() || truth->mask_x.cols() != x.cols())
    throw ShapeMismatch("dataset: X mask shape differs from X");
  if (truth->mask_y.size() != y.size()) throw ShapeMismatch("dataset: y mask length differs");
}

IndexList active_indices(std::span<const double> beta) {
  IndexList out;
  for (std::size_t j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) out.push_back(j);
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t start = field.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? std::string{} : field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ShapeMismatch(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(table.header.size()) + " fields, found " +
                          std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw Error(path + ":" + std::to_string(line_no) + ": field '" + table.header[c] +
                    "' is not a finite number: '" + f + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (table.header.empty()) throw Error(path + ": empty file");
  table.values = Matrix(rows, table.header.size(), std::move(values));
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) out << (c ? "," : "") << values(r, c);
    out << '\n';
  }
}

Dataset dataset_from_table(const CsvTable& table) {
  if (table.header.size() < 2 || table.header[0] != "y") {
    throw Error("data CSV must have header y,x1,...,xp");
  }
  const std::size_t n = table.values.rows();
  const std::size_t p = table.values.cols() - 1;
  Dataset d;
  d.y = table.values.column(0);
  d.x = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) d.x(i, j) = table.values(i, j + 1);
  return d;
}

std::vector<std::string> predictor_header(std::size_t p, bool with_response) {
  std::vector<std::string> h;
  if (with_response) h.push_back("y");
  for (std::size_t j = 0; j < p; ++j) h.push_back("x" + std::to_string(j + 1));
  return h;
}

namespace {

Matrix joint(std::span<const double> y, const Matrix& x) {
  Matrix z(x.rows(), x.cols() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    z(i, 0) = y[i];
    for (std::size_t j = 0; j < x.cols(); ++j) z(i, j + 1) = x(i, j);
  }
  return z;
}

}  // namespace

void write_dataset_csv(const std::string& path, const Dataset& data) {
  data.validate();
  write_csv(path, predictor_header(data.p(), true), joint(data.y, data.x));
}

void write_mask_csv(const std::string& path, const Dataset& data) {
  if (!data.truth) throw Error("write_mask_csv: dataset carries no ground truth");
  write_csv(path, predictor_header(data.p(), true), joint(data.truth->mask_y, data.truth->mask_x));
}

}  // namespace fscre
