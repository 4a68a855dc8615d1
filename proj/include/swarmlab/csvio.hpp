// Deterministic CSV and binary-snapshot writers: full-precision %.17g
// scalars, fixed column order, newline-terminated rows.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "swarmlab/simulator.hpp"

namespace swarmlab {

std::string format_full(double v);  // shortest round-trippable %.17g

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void write_row(const std::vector<double>& values);
  void write_row_mixed(const std::vector<std::string>& values);
  void flush();

 private:
  std::ofstream out_;
  size_t columns_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// Parses a numeric CSV written by this library. Throws ConfigError on
// malformed input or an empty table.
CsvTable read_csv(const std::string& path);

// Little-endian snapshot: uint64 n, uint64 dim, positions (n*dim doubles),
// velocities (n*dim doubles).
void write_snapshot(const std::string& path, const ParticleEnsemble& state);
ParticleEnsemble read_snapshot(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace swarmlab
