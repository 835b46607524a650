#include "ome/core/dataset.hpp"

#include <cmath>
#include <string>

namespace ome {

namespace {

void check_binary(const BinaryColumn& col, std::size_t n, const char* name) {
  if (col.size() != n) {
    throw ValidationError(std::string(name) + ": expected " + std::to_string(n) +
                          " rows, got " + std::to_string(col.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (col[i] > 1) {
      throw ValidationError("row " + std::to_string(i) + ": column " + name +
                            " holds " + std::to_string(int(col[i])) +
                            ", expected 0 or 1");
    }
  }
}

}  // namespace

void ErrorParams::validate(const char* what) const {
  if (!valid()) {
    throw ConfigError(std::string(what) + ": (alpha=" + std::to_string(alpha) +
                      ", beta=" + std::to_string(beta) +
                      ") must satisfy alpha, beta in [0,1) and alpha + beta < 1");
  }
}

std::string Dataset::covariate_name(std::size_t j) const {
  if (j < covariate_names.size()) return covariate_names[j];
  return "x" + std::to_string(j);
}

std::size_t Dataset::covariate_index(const std::string& name) const {
  for (std::size_t j = 0; j < dim(); ++j) {
    if (covariate_name(j) == name) return j;
  }
  throw DataError("unknown covariate column: " + name);
}

Dataset Dataset::subset(const RowSet& rows) const {
  Dataset out;
  out.covariate_names = covariate_names;
  out.x = Matrix(rows.size(), dim());
  auto take = [&](const BinaryColumn& src) {
    BinaryColumn dst(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = src[rows[i]];
    return dst;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = x.row(rows[i]);
    auto dst = out.x.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  out.t = take(t);
  out.y = take(y);
  if (y_star_0) out.y_star_0 = take(*y_star_0);
  if (y_star_1) out.y_star_1 = take(*y_star_1);
  if (y_0) out.y_0 = take(*y_0);
  if (y_1) out.y_1 = take(*y_1);
  out.fold.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.fold[i] = fold.empty() ? -1 : fold[rows[i]];
  }
  return out;
}

RowSet rows_of_arm(const Dataset& ds, int arm) {
  RowSet out;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (ds.t[i] == arm) out.push_back(static_cast<std::int32_t>(i));
  }
  return out;
}

RowSet all_rows(const Dataset& ds) {
  RowSet out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) out[i] = static_cast<std::int32_t>(i);
  return out;
}

const Dataset& validate_dataset(const Dataset& ds) {
  const std::size_t n = ds.n();
  if (n < 1) throw ValidationError("dataset is empty");
  if (ds.dim() < 1) throw ValidationError("dataset has no covariates");
  if (ds.x.rows() != n) {
    throw ValidationError("covariate matrix has " + std::to_string(ds.x.rows()) +
                          " rows, expected " + std::to_string(n));
  }
  if (!ds.fold.empty() && ds.fold.size() != n) {
    throw ValidationError("fold column has wrong length");
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      if (!std::isfinite(ds.x(i, j))) {
        throw ValidationError("row " + std::to_string(i) + ": covariate " +
                              ds.covariate_name(j) + " is not finite");
      }
    }
  }

  check_binary(ds.t, n, "t");
  check_binary(ds.y, n, "y");
  if (ds.y_star_0.has_value() != ds.y_star_1.has_value()) {
    throw ValidationError("y_star_0 and y_star_1 must be present together");
  }
  if (ds.y_0.has_value() != ds.y_1.has_value()) {
    throw ValidationError("y_0 and y_1 must be present together");
  }
  if (ds.y_star_0) check_binary(*ds.y_star_0, n, "y_star_0");
  if (ds.y_star_1) check_binary(*ds.y_star_1, n, "y_star_1");
  if (ds.y_0) check_binary(*ds.y_0, n, "y_0");
  if (ds.y_1) check_binary(*ds.y_1, n, "y_1");

  // Consistency: the observed proxy equals the factual proxy potential outcome.
  if (ds.has_oracle_proxies()) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t factual = ds.t[i] ? (*ds.y_1)[i] : (*ds.y_0)[i];
      if (ds.y[i] != factual) {
        throw ValidationError("row " + std::to_string(i) +
                              ": y does not equal t*y_1 + (1-t)*y_0");
      }
    }
  }
  return ds;
}

}  // namespace ome
