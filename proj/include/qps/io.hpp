#pragma once

#include "qps/discretization.hpp"
#include "qps/lattice_modes.hpp"

#include <string>
#include <vector>

namespace qps {

// Field dump: magic "QPSFLD1\0", int32 j1, j2, grid, depths, components (3), the depths as doubles, then
// grid*grid*depths*3 complex doubles ordered (n1, n2, depth, component), little endian.
void write_field_file(const std::string& path, LatticeIndex cell, const GridField& field, const std::vector<double>& depths);

struct FieldFile {
  LatticeIndex cell;
  std::vector<double> depths;
  GridField field;
};
FieldFile read_field_file(const std::string& path);

// %.17g
std::string csv_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  void add(const std::vector<double>& row);
  size_t rows() const { return rows_.size(); }
  std::string text() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::string& path, const std::string& text);

}  // namespace qps
