#include "ome/core/folds.hpp"

#include <array>
#include <string>

namespace ome {

std::vector<RowSet> split_rows(const Dataset& ds, const RowSet& rows,
                               std::size_t k, RngSeed seed) {
  if (k < 2) throw DataError("fold count must be at least 2");
  if (rows.size() < k) {
    throw DataError("cannot split " + std::to_string(rows.size()) +
                    " rows into " + std::to_string(k) + " folds");
  }

  std::array<RowSet, 2> by_arm;
  for (auto r : rows) by_arm[ds.t[r]].push_back(r);
  for (int arm = 0; arm < 2; ++arm) {
    if (!by_arm[arm].empty() && by_arm[arm].size() < k) {
      throw DataError("treatment arm t=" + std::to_string(arm) + " has " +
                      std::to_string(by_arm[arm].size()) +
                      " rows and cannot appear in all " + std::to_string(k) +
                      " folds");
    }
  }

  Rng rng(seed);
  std::vector<RowSet> parts(k);
  // The remainder of each arm is handed out starting where the previous
  // arm stopped, so overall part sizes differ by at most one.
  std::size_t extra_cursor = 0;
  for (int arm = 0; arm < 2; ++arm) {
    auto& arm_rows = by_arm[arm];
    if (arm_rows.empty()) continue;
    rng.shuffle(arm_rows);
    const std::size_t base = arm_rows.size() / k;
    const std::size_t rem = arm_rows.size() % k;
    std::size_t pos = 0;
    std::vector<std::size_t> quota(k, base);
    for (std::size_t e = 0; e < rem; ++e) quota[(extra_cursor + e) % k] += 1;
    extra_cursor = (extra_cursor + rem) % k;
    for (std::size_t f = 0; f < k; ++f) {
      for (std::size_t c = 0; c < quota[f]; ++c) parts[f].push_back(arm_rows[pos++]);
    }
  }
  return parts;
}

Dataset partition_folds(const Dataset& ds, std::size_t k, RngSeed seed) {
  auto parts = split_rows(ds, all_rows(ds), k, seed);
  Dataset out = ds;
  out.fold.assign(ds.n(), -1);
  for (std::size_t f = 0; f < parts.size(); ++f) {
    for (auto r : parts[f]) out.fold[r] = static_cast<std::int32_t>(f);
  }
  return out;
}

RowSet rows_of_fold(const Dataset& ds, std::int32_t fold) {
  RowSet out;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (!ds.fold.empty() && ds.fold[i] == fold) {
      out.push_back(static_cast<std::int32_t>(i));
    }
  }
  return out;
}

}  // namespace ome
