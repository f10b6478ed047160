#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spiraldim/curve.hpp"
#include "spiraldim/fractal.hpp"
#include "spiraldim/phase.hpp"

namespace spiraldim::io {

/// Formats with %.17g so values round-trip exactly.
std::string format_double(double v);

/// `t,x,y` or `t,x,y,z`.
void write_curve(std::ostream& out, const Curve& curve);
void write_counts(std::ostream& out, const fractal::ScaleCounts& counts);
void write_measures(std::ostream& out, const fractal::MeasureProfile& profile);
void write_profile(std::ostream& out, const phase::PolarProfile& profile);
/// `n,r,d` with d = r_(n+1) - r_n (empty on the last row).
void write_returns(std::ostream& out, const phase::ReturnSequence& seq);

/// Reads a `t,x,y[,z]` file written by write_curve; max_chord is measured.
Curve read_curve(std::istream& in, const std::string& origin = "<stream>");
Curve read_curve_file(const std::string& path);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_key_values(std::ostream& out, const KeyValues& kv);

/// Writes through a temporary buffer; throws Error if the file cannot be written.
void write_file(const std::string& path, const std::string& contents);

/// `key = value` lines; `#` starts a comment; later keys override earlier ones.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Strict numeric parsing; throws PreconditionError naming the field.
double parse_double(const std::string& text, const std::string& field);
long long parse_int(const std::string& text, const std::string& field);
/// Comma- or space-separated list of reals.
std::vector<double> parse_doubles(const std::string& text, const std::string& field);

}  // namespace spiraldim::io
