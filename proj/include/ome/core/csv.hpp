#pragma once

#include <iosfwd>
#include <string>

#include "ome/core/dataset.hpp"

namespace ome {

// CSV schema: one header row; required columns `t`, `y`; optional columns
// `y_star_0`, `y_star_1`, `y_0`, `y_1`, `fold`; every other column is a
// covariate (kept in file order). Binary columns hold {0,1} integers,
// covariates decimal reals.
Dataset read_csv(std::istream& in, const std::string& origin = "<stream>");
Dataset read_csv_file(const std::string& path);

// Writes the schema above. Covariates are printed with max_digits10
// precision so generated files are deterministic and round-trip exactly.
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv_file(const Dataset& ds, const std::string& path);

}  // namespace ome
