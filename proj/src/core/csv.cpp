#include "ome/core/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace ome {

namespace {

const std::set<std::string> kReserved = {"t",   "y",   "y_star_0", "y_star_1",
                                         "y_0", "y_1", "fold"};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_real(const std::string& s, std::size_t row, const std::string& col,
                  const std::string& origin) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError(origin + ": row " + std::to_string(row) + ", column " + col +
                    ": cannot parse '" + s + "' as a real number");
  }
  return v;
}

std::uint8_t parse_binary(const std::string& s, std::size_t row,
                          const std::string& col, const std::string& origin) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw DataError(origin + ": row " + std::to_string(row) + ", column " + col +
                  ": expected 0 or 1, got '" + s + "'");
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  struct ColRef {
    enum Kind { Covariate, T, Y, Ys0, Ys1, Y0, Y1, Fold } kind;
    std::size_t covariate_slot = 0;
  };
  std::vector<ColRef> refs;
  std::vector<std::string> covariate_names;
  bool has_t = false, has_y = false;
  std::set<std::string> seen;
  for (const auto& name : header) {
    if (!seen.insert(name).second) {
      throw DataError(origin + ": duplicate column '" + name + "'");
    }
    ColRef ref;
    if (name == "t") ref.kind = ColRef::T, has_t = true;
    else if (name == "y") ref.kind = ColRef::Y, has_y = true;
    else if (name == "y_star_0") ref.kind = ColRef::Ys0;
    else if (name == "y_star_1") ref.kind = ColRef::Ys1;
    else if (name == "y_0") ref.kind = ColRef::Y0;
    else if (name == "y_1") ref.kind = ColRef::Y1;
    else if (name == "fold") ref.kind = ColRef::Fold;
    else {
      ref.kind = ColRef::Covariate;
      ref.covariate_slot = covariate_names.size();
      covariate_names.push_back(name);
    }
    refs.push_back(ref);
  }
  if (!has_t || !has_y) throw DataError(origin + ": columns t and y are required");
  if (covariate_names.empty()) throw DataError(origin + ": no covariate columns");

  std::vector<double> xflat;
  Dataset ds;
  ds.covariate_names = covariate_names;
  BinaryColumn ys0, ys1, y0, y1;
  bool saw_ys0 = false, saw_ys1 = false, saw_y0 = false, saw_y1 = false;
  for (const auto& ref : refs) {
    if (ref.kind == ColRef::Ys0) saw_ys0 = true;
    if (ref.kind == ColRef::Ys1) saw_ys1 = true;
    if (ref.kind == ColRef::Y0) saw_y0 = true;
    if (ref.kind == ColRef::Y1) saw_y1 = true;
  }

  std::size_t row = 0;
  std::vector<double> covs(covariate_names.size());
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != refs.size()) {
      throw DataError(origin + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(refs.size()));
    }
    for (std::size_t c = 0; c < refs.size(); ++c) {
      const auto& ref = refs[c];
      const auto& field = fields[c];
      switch (ref.kind) {
        case ColRef::Covariate:
          covs[ref.covariate_slot] = parse_real(field, row, header[c], origin);
          break;
        case ColRef::T: ds.t.push_back(parse_binary(field, row, "t", origin)); break;
        case ColRef::Y: ds.y.push_back(parse_binary(field, row, "y", origin)); break;
        case ColRef::Ys0: ys0.push_back(parse_binary(field, row, "y_star_0", origin)); break;
        case ColRef::Ys1: ys1.push_back(parse_binary(field, row, "y_star_1", origin)); break;
        case ColRef::Y0: y0.push_back(parse_binary(field, row, "y_0", origin)); break;
        case ColRef::Y1: y1.push_back(parse_binary(field, row, "y_1", origin)); break;
        case ColRef::Fold:
          ds.fold.push_back(static_cast<std::int32_t>(
              parse_real(field, row, "fold", origin)));
          break;
      }
    }
    xflat.insert(xflat.end(), covs.begin(), covs.end());
    ++row;
  }
  if (row == 0) throw DataError(origin + ": no data rows");

  ds.x = Matrix(row, covariate_names.size());
  ds.x.data() = std::move(xflat);
  if (saw_ys0) ds.y_star_0 = std::move(ys0);
  if (saw_ys1) ds.y_star_1 = std::move(ys1);
  if (saw_y0) ds.y_0 = std::move(y0);
  if (saw_y1) ds.y_1 = std::move(y1);
  validate_dataset(ds);
  return ds;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_csv(in, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  const bool write_fold = [&] {
    for (auto f : ds.fold) {
      if (f >= 0) return true;
    }
    return false;
  }();

  for (std::size_t j = 0; j < ds.dim(); ++j) {
    if (j) out << ',';
    out << ds.covariate_name(j);
  }
  out << ",t,y";
  if (ds.y_star_0) out << ",y_star_0";
  if (ds.y_star_1) out << ",y_star_1";
  if (ds.y_0) out << ",y_0";
  if (ds.y_1) out << ",y_1";
  if (write_fold) out << ",fold";
  out << '\n';

  char buf[64];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", ds.x(i, j));
      out << buf;
    }
    out << ',' << int(ds.t[i]) << ',' << int(ds.y[i]);
    if (ds.y_star_0) out << ',' << int((*ds.y_star_0)[i]);
    if (ds.y_star_1) out << ',' << int((*ds.y_star_1)[i]);
    if (ds.y_0) out << ',' << int((*ds.y_0)[i]);
    if (ds.y_1) out << ',' << int((*ds.y_1)[i]);
    if (write_fold) out << ',' << ds.fold[i];
    out << '\n';
  }
}

void write_csv_file(const Dataset& ds, const std::string& path) {
  // Write-then-rename so partially written files never appear at `path`.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot open " + tmp + " for writing");
    write_csv(ds, out);
    if (!out) throw DataError("write to " + tmp + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ome
