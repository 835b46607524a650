#pragma once

#include "ome/core/dataset.hpp"
#include "ome/core/rng.hpp"

namespace ome {

// Split the given rows into k random parts, stratified by treatment arm.
// Within each arm part sizes differ by at most one, and arm remainders are
// rotated across parts so overall part sizes also differ by at most one.
// Throws DataError if rows.size() < k or a non-empty arm has fewer than k rows.
std::vector<RowSet> split_rows(const Dataset& ds, const RowSet& rows,
                               std::size_t k, RngSeed seed);

// Tags every row of ds with a fold id in [0, k) using split_rows over all
// rows. Returns a copy with the fold column filled in.
Dataset partition_folds(const Dataset& ds, std::size_t k, RngSeed seed);

// Rows carrying the given fold tag.
RowSet rows_of_fold(const Dataset& ds, std::int32_t fold);

}  // namespace ome
