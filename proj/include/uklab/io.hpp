#ifndef UKLAB_IO_HPP
#define UKLAB_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uklab/grid.hpp"

namespace uklab {

/// Shortest round-trippable decimal form of a double (%.17g), used for
/// every CSV cell so reruns are byte-identical.
std::string format_double(double v);

/// CSV with one header row; cells are format_double'd.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Measure container: little-endian binary, magic "UKMEAS01", then
/// u32 d, u32 N, f64 mass, u64 seed, u32 name length, name bytes, and
/// N^d f64 weights in row-major multi-index order.
void save_measure_binary(const std::string& path, const GridMeasure& mu,
                         const std::string& name, uint64_t seed);
GridMeasure load_measure_binary(const std::string& path, std::string* name_out = nullptr,
                                uint64_t* seed_out = nullptr);

/// CSV flavor of the same payload: one metadata header line, then
/// index,weight rows.
void save_measure_csv(const std::string& path, const GridMeasure& mu, const std::string& name,
                      uint64_t seed);

}  // namespace uklab

#endif  // UKLAB_IO_HPP
