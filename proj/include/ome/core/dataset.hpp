#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ome/core/errors.hpp"
#include "ome/core/matrix.hpp"

namespace ome {

// Per-treatment proxy error rates: alpha = false positive rate
// p(Y_t=1 | Y*_t=0), beta = false negative rate p(Y_t=0 | Y*_t=1).
struct ErrorParams {
  double alpha = 0.0;
  double beta = 0.0;

  bool valid() const {
    return alpha >= 0.0 && alpha < 1.0 && beta >= 0.0 && beta < 1.0 &&
           alpha + beta < 1.0;
  }
  // Throws ConfigError unless alpha, beta in [0,1) and alpha + beta < 1.
  void validate(const char* what = "error params") const;

  bool operator==(const ErrorParams&) const = default;
};

using BinaryColumn = std::vector<std::uint8_t>;

// Rows of (covariates x, treatment t, observed proxy y), optionally carrying
// oracle potential-outcome columns, plus a fold tag per row (-1 = untagged).
//
// Oracle columns are all-or-nothing per pair: targets (y_star_0, y_star_1)
// and proxies (y_0, y_1) are either both present or both absent.
struct Dataset {
  Matrix x;  // n x d covariates
  BinaryColumn t;
  BinaryColumn y;
  std::optional<BinaryColumn> y_star_0;
  std::optional<BinaryColumn> y_star_1;
  std::optional<BinaryColumn> y_0;
  std::optional<BinaryColumn> y_1;
  std::vector<std::int32_t> fold;
  std::vector<std::string> covariate_names;  // empty => x0, x1, ...

  std::size_t n() const { return t.size(); }
  std::size_t dim() const { return x.cols(); }

  bool has_oracle_targets() const { return y_star_0 && y_star_1; }
  bool has_oracle_proxies() const { return y_0 && y_1; }

  // Factual target of row i (Y* by consistency). Requires oracle targets.
  std::uint8_t factual_target(std::size_t i) const {
    return t[i] ? (*y_star_1)[i] : (*y_star_0)[i];
  }

  std::string covariate_name(std::size_t j) const;
  // Index of a named covariate; throws DataError if unknown.
  std::size_t covariate_index(const std::string& name) const;

  // Keep only the given rows, in the given order.
  Dataset subset(const std::vector<std::int32_t>& rows) const;
};

using RowSet = std::vector<std::int32_t>;

// Row indices with t == arm.
RowSet rows_of_arm(const Dataset& ds, int arm);
RowSet all_rows(const Dataset& ds);

// Checks every Dataset invariant (column sizes, binary domains, proxy
// consistency y == t*y_1 + (1-t)*y_0, finite covariates) and returns the
// dataset unchanged. Throws ValidationError naming the first violation and
// its row index.
const Dataset& validate_dataset(const Dataset& ds);

}  // namespace ome
