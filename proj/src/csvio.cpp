#include "swarmlab/csvio.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "swarmlab/errors.hpp"

namespace swarmlab {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
  for (size_t j = 0; j < header.size(); ++j) {
    if (j) out_ << ',';
    out_ << header[j];
  }
  out_ << '\n';
}

void CsvWriter::write_row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw std::invalid_argument("csv row width mismatch");
  for (size_t j = 0; j < values.size(); ++j) {
    if (j) out_ << ',';
    out_ << format_full(values[j]);
  }
  out_ << '\n';
}

void CsvWriter::write_row_mixed(const std::vector<std::string>& values) {
  if (values.size() != columns_)
    throw std::invalid_argument("csv row width mismatch");
  for (size_t j = 0; j < values.size(); ++j) {
    if (j) out_ << ',';
    out_ << values[j];
  }
  out_ << '\n';
}

void CsvWriter::flush() { out_.flush(); }

int CsvTable::column(const std::string& name) const {
  for (size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<int>(j);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open csv file '" + path + "'");
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (!have_header) {
      table.header = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw ConfigError(path + " line " + std::to_string(line_no) +
                        ": expected " + std::to_string(table.header.size()) +
                        " columns");
    std::vector<double> numbers;
    numbers.reserve(cells.size());
    for (const std::string& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0')
        throw ConfigError(path + " line " + std::to_string(line_no) +
                          ": non-numeric cell '" + c + "'");
      numbers.push_back(v);
    }
    table.rows.push_back(std::move(numbers));
  }
  if (table.header.empty() || table.rows.empty())
    throw ConfigError(path + ": empty table");
  return table;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int j = 0; j < 8; ++j) buf[j] = static_cast<unsigned char>(v >> (8 * j));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int j = 0; j < 8; ++j) v |= static_cast<std::uint64_t>(buf[j]) << (8 * j);
  return v;
}

void put_doubles(std::ofstream& out, const double* v, size_t n) {
  for (size_t k = 0; k < n; ++k) {
    std::uint64_t bits;
    std::memcpy(&bits, &v[k], 8);
    put_u64(out, bits);
  }
}

}  // namespace

void write_snapshot(const std::string& path, const ParticleEnsemble& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const int n = state.size();
  const int dim = state.dim;
  put_u64(out, static_cast<std::uint64_t>(n));
  put_u64(out, static_cast<std::uint64_t>(dim));
  for (int i = 0; i < n; ++i) put_doubles(out, state.positions[i].data(), dim);
  for (int i = 0; i < n; ++i) put_doubles(out, state.velocities[i].data(), dim);
}

ParticleEnsemble read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  ParticleEnsemble state;
  const std::uint64_t n = get_u64(in);
  const std::uint64_t dim = get_u64(in);
  if (!in || dim < 1 || dim > kMaxDim || n > (1ull << 32))
    throw ConfigError(path + ": malformed snapshot header");
  state.dim = static_cast<int>(dim);
  state.positions.assign(n, Point{});
  state.velocities.assign(n, Point{});
  auto read_points = [&](std::vector<Point>& pts) {
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::uint64_t k = 0; k < dim; ++k) {
        const std::uint64_t bits = get_u64(in);
        double v;
        std::memcpy(&v, &bits, 8);
        pts[i][k] = v;
      }
  };
  read_points(state.positions);
  read_points(state.velocities);
  if (!in) throw ConfigError(path + ": truncated snapshot");
  return state;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace swarmlab
