#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "frostdecay/dyadic.hpp"
#include "frostdecay/measure.hpp"

namespace frostdecay {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Measure file:
//   MEAS n=<int> rmin=<decimal>
//   <x1> ... <xn> <mass>        one atom per line, 17 significant digits
// CubeSet file:
//   CUBES n=<int> level=<int>
//   <i1> ... <in>               one member per line
// '#' starts a comment in both formats; blank lines are ignored.

void write_measure(std::ostream& out, const AtomicMeasure& mu);
AtomicMeasure read_measure(std::istream& in);
void write_cubeset(std::ostream& out, const CubeSet& set);
CubeSet read_cubeset(std::istream& in);

/// Point samples of a vector field f: R^n -> R^n.
struct FieldSamples {
  std::size_t dim = 0;
  std::vector<double> points;  ///< dim values per sample
  std::vector<double> values;  ///< dim values per sample

  std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }
};

/// Comma-separated: header `x1,...,xn,f1,...,fn`, then one row per sample.
void write_field_samples(std::ostream& out, const FieldSamples& field);
FieldSamples read_field_samples(std::istream& in);

/// Round-trip decimal text of a double (17 significant digits).
std::string format_double(double v);

AtomicMeasure load_measure(const std::filesystem::path& path);
void save_measure(const std::filesystem::path& path, const AtomicMeasure& mu);
CubeSet load_cubeset(const std::filesystem::path& path);
void save_cubeset(const std::filesystem::path& path, const CubeSet& set);

}  // namespace frostdecay
