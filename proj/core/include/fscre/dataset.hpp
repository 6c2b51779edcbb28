#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fscre/matrix.hpp"

namespace fscre {

struct GroundTruth {
  Vector beta;
  IndexList active_set;  // { j : beta_j != 0 }, ascending
  Matrix mask_x;         // n x p, entries 0/1
  Vector mask_y;         // length n, entries 0/1
  double noise_sd = 1.0;
};

struct Dataset {
  Vector y;
  Matrix x;
  std::optional<GroundTruth> truth;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t p() const noexcept { return x.cols(); }

  // Throws ShapeMismatch when y and X disagree, or truth has the wrong shape.
  void validate() const;
};

IndexList active_indices(std::span<const double> beta);

// CSV with header `y,x1,...,xp`. Column names other than the first are kept so
// errors can refer to them.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values);

Dataset dataset_from_table(const CsvTable& table);
void write_dataset_csv(const std::string& path, const Dataset& data);
// Writes `y,x1..xp` 0/1 masks; requires ground truth.
void write_mask_csv(const std::string& path, const Dataset& data);

std::vector<std::string> predictor_header(std::size_t p, bool with_response);

}  // namespace fscre
