#include "macorner/model/field_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "macorner/errors.hpp"

namespace macorner {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("malformed number '" + s + "' on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

void write_field_csv(std::ostream& os, const ScalarField& u) {
  const Grid2D& g = u.grid();
  os << "x1,x2,u\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == NodeKind::Exterior) continue;
    const Vec2 x = g.point(k);
    os << format_g17(x[0]) << ',' << format_g17(x[1]) << ',' << format_g17(u[k]) << '\n';
  }
}

nlohmann::json field_metadata_json(const ScalarField& u) {
  const FieldMeta& m = u.meta();
  nlohmann::json j;
  j["c"] = m.c ? nlohmann::json(*m.c) : nlohmann::json(nullptr);
  j["t"] = m.t ? nlohmann::json(*m.t) : nlohmann::json(nullptr);
  j["h"] = u.grid().h();
  j["R"] = u.grid().R();
  j["shape"] = to_string(u.grid().shape());
  j["provenance"] = m.provenance;
  if (m.lambda) j["lambda"] = *m.lambda;
  if (!m.report_id.empty()) j["report_id"] = m.report_id;
  return j;
}

void save_field(const ScalarField& u, const std::filesystem::path& stem) {
  std::filesystem::path csv = stem, meta = stem;
  csv += ".csv";
  meta += ".json";
  std::ofstream os(csv);
  if (!os) throw InputError("cannot write " + csv.string());
  write_field_csv(os, u);
  std::ofstream ms(meta);
  if (!ms) throw InputError("cannot write " + meta.string());
  ms << field_metadata_json(u).dump(2) << '\n';
}

ScalarField load_field(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path) {
  std::ifstream ms(meta_path);
  if (!ms) throw InputError("cannot open " + meta_path.string());
  nlohmann::json meta;
  try {
    ms >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed field metadata: " + std::string(e.what()));
  }
  std::shared_ptr<const Grid2D> grid;
  FieldMeta fm;
  try {
    grid = make_grid(meta.at("h").get<double>(), meta.at("R").get<double>(),
                     grid_shape_from_string(meta.at("shape").get<std::string>()));
    if (meta.contains("c") && !meta["c"].is_null()) fm.c = meta["c"].get<double>();
    if (meta.contains("t") && !meta["t"].is_null()) fm.t = meta["t"].get<double>();
    if (meta.contains("lambda")) fm.lambda = meta["lambda"].get<double>();
    fm.provenance = meta.value("provenance", std::string());
    fm.report_id = meta.value("report_id", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("incomplete field metadata: " + std::string(e.what()));
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid grid in metadata: ") + e.what());
  }

  std::ifstream is(csv_path);
  if (!is) throw InputError("cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(is, line) || line != "x1,x2,u") throw InputError("field CSV lacks the x1,x2,u header");

  std::vector<double> values(grid->size(), 0.0);
  std::vector<char> seen(grid->size(), 0);
  std::size_t lineno = 1, rows = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw InputError("expected three columns on line " + std::to_string(lineno));
    }
    const Vec2 x(parse_double(line.substr(0, c1), lineno), parse_double(line.substr(c1 + 1, c2 - c1 - 1), lineno));
    const double v = parse_double(line.substr(c2 + 1), lineno);
    if (!std::isfinite(v)) throw InputError("non-finite value on line " + std::to_string(lineno));
    std::size_t idx = 0;
    try {
      idx = grid->node_at(x);
    } catch (const ExtentError&) {
      throw InputError("row off the lattice on line " + std::to_string(lineno));
    }
    if (grid->kind(idx) == NodeKind::Exterior || seen[idx]) {
      throw InputError("unexpected or duplicate node on line " + std::to_string(lineno));
    }
    seen[idx] = 1;
    values[idx] = v;
    ++rows;
  }
  const std::size_t expected = grid->size() - grid->count(NodeKind::Exterior);
  if (rows != expected) {
    throw InputError("field CSV has " + std::to_string(rows) + " rows, expected " + std::to_string(expected));
  }
  return ScalarField(std::move(grid), std::move(values), std::move(fm));
}

ScalarField load_field(const std::filesystem::path& stem) {
  std::filesystem::path csv = stem, meta = stem;
  csv += ".csv";
  meta += ".json";
  return load_field(csv, meta);
}

}  // namespace macorner
