#include "qps/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace qps {

namespace {

constexpr char kMagic[8] = {'Q', 'P', 'S', 'F', 'L', 'D', '1', '\0'};

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + parent.string() + ": " + ec.message());
}

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_field_file(const std::string& path, LatticeIndex cell, const GridField& field, const std::vector<double>& depths) {
  if (static_cast<int>(depths.size()) != field.points()) fail(ErrorCode::invalid_argument, "depth list does not match the field");
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put<int32_t>(out, cell.j1);
  put<int32_t>(out, cell.j2);
  put<int32_t>(out, field.grid());
  put<int32_t>(out, field.points());
  put<int32_t>(out, 3);
  out.write(reinterpret_cast<const char*>(depths.data()), static_cast<std::streamsize>(depths.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(field.data().data()),
            static_cast<std::streamsize>(field.data().size() * sizeof(Complex)));
  if (!out) fail(ErrorCode::io, "write failed for " + path);
}

FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) fail(ErrorCode::io, path + " is not a field file");
  FieldFile f;
  f.cell.j1 = get<int32_t>(in);
  f.cell.j2 = get<int32_t>(in);
  const int ng = get<int32_t>(in), nz = get<int32_t>(in), nc = get<int32_t>(in);
  if (!in || ng < 1 || nz < 0 || nc != 3) fail(ErrorCode::io, path + ": bad header");
  f.depths.resize(nz);
  in.read(reinterpret_cast<char*>(f.depths.data()), static_cast<std::streamsize>(nz * sizeof(double)));
  f.field = GridField(ng, nz);
  in.read(reinterpret_cast<char*>(f.field.data().data()),
          static_cast<std::streamsize>(f.field.data().size() * sizeof(Complex)));
  if (!in) fail(ErrorCode::io, path + ": truncated");
  return f;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) fail(ErrorCode::invalid_argument, "csv row has the wrong width");
  rows_.push_back(std::move(row));
}

void CsvTable::add(const std::vector<double>& row) {
  std::vector<std::string> s;
  for (double v : row) s.push_back(csv_number(v));
  add(std::move(s));
}

std::string CsvTable::text() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, text()); }

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::io, "write failed for " + path);
}

}  // namespace qps
