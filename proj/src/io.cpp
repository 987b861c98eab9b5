#include "uklab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace uklab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("write_csv: cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("write_text_file: cannot open " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

constexpr char kMagic[8] = {'U', 'K', 'M', 'E', 'A', 'S', '0', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  // the artifact targets little-endian hosts; the format is defined LE
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void save_measure_binary(const std::string& path, const GridMeasure& mu,
                         const std::string& name, uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("save_measure_binary: cannot open " + path);
  out.write(kMagic, sizeof kMagic);
  put<uint32_t>(out, static_cast<uint32_t>(mu.grid.d));
  put<uint32_t>(out, static_cast<uint32_t>(mu.grid.n));
  put<double>(out, mu.mass);
  put<uint64_t>(out, seed);
  put<uint32_t>(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  out.write(reinterpret_cast<const char*>(mu.weights.data()),
            static_cast<std::streamsize>(mu.weights.size() * sizeof(double)));
}

GridMeasure load_measure_binary(const std::string& path, std::string* name_out,
                                uint64_t* seed_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("load_measure_binary: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw PreconditionError("load_measure_binary: bad magic in " + path);
  const auto d = get<uint32_t>(in);
  const auto n = get<uint32_t>(in);
  const double mass = get<double>(in);
  const uint64_t seed = get<uint64_t>(in);
  const auto name_len = get<uint32_t>(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  TorusGrid g(static_cast<int>(d), static_cast<int64_t>(n));
  std::vector<double> w(static_cast<size_t>(g.cells()));
  in.read(reinterpret_cast<char*>(w.data()),
          static_cast<std::streamsize>(w.size() * sizeof(double)));
  if (!in) throw PreconditionError("load_measure_binary: truncated file " + path);
  GridMeasure mu(g, std::move(w));
  if (std::abs(mu.mass - mass) > 1e-9 * std::max(1.0, mass))
    throw PreconditionError("load_measure_binary: stored mass disagrees with weights");
  if (name_out) *name_out = name;
  if (seed_out) *seed_out = seed;
  return mu;
}

void save_measure_csv(const std::string& path, const GridMeasure& mu, const std::string& name,
                      uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("save_measure_csv: cannot open " + path);
  out << "# d=" << mu.grid.d << " N=" << mu.grid.n << " mass=" << format_double(mu.mass)
      << " name=" << name << " seed=" << seed << "\n";
  out << "index,weight\n";
  for (size_t i = 0; i < mu.weights.size(); ++i)
    out << i << "," << format_double(mu.weights[i]) << "\n";
}

}  // namespace uklab
