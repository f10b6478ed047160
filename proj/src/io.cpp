#include "spiraldim/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spiraldim/error.hpp"

namespace spiraldim::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve(std::ostream& out, const Curve& curve) {
  out << (curve.ambient() == 3 ? "t,x,y,z\n" : "t,x,y\n");
  std::string line;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    line = format_double(curve.param(i));
    for (int a = 0; a < curve.ambient(); ++a) {
      line += ',';
      line += format_double(curve.coord(i, a));
    }
    line += '\n';
    out << line;
  }
}

void write_counts(std::ostream& out, const fractal::ScaleCounts& counts) {
  out << "epsilon,count\n";
  for (std::size_t k = 0; k < counts.counts.size(); ++k)
    out << format_double(counts.ladder.epsilons[k]) << ',' << counts.counts[k] << '\n';
}

void write_measures(std::ostream& out, const fractal::MeasureProfile& profile) {
  out << "epsilon,measure\n";
  for (std::size_t k = 0; k < profile.measures.size(); ++k)
    out << format_double(profile.ladder.epsilons[k]) << ',' << format_double(profile.measures[k])
        << '\n';
}

void write_profile(std::ostream& out, const phase::PolarProfile& profile) {
  out << "phi,r\n";
  for (std::size_t i = 0; i < profile.phis.size(); ++i)
    out << format_double(profile.phis[i]) << ',' << format_double(profile.radii[i]) << '\n';
}

void write_returns(std::ostream& out, const phase::ReturnSequence& seq) {
  out << "n,r,d\n";
  for (std::size_t k = 0; k < seq.radii.size(); ++k) {
    out << k << ',' << format_double(seq.radii[k]) << ',';
    if (k + 1 < seq.radii.size()) out << format_double(seq.radii[k + 1] - seq.radii[k]);
    out << '\n';
  }
}

Curve read_curve(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError(origin + ": empty curve file");
  line = trim(line);
  int ambient = 0;
  if (line == "t,x,y")
    ambient = 2;
  else if (line == "t,x,y,z")
    ambient = 3;
  else
    throw PreconditionError(origin + ": expected header t,x,y or t,x,y,z");
  std::vector<double> params, coords;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<double> v = parse_doubles(line, origin + ":" + std::to_string(lineno));
    if (v.size() != static_cast<std::size_t>(ambient) + 1)
      throw PreconditionError(origin + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(ambient + 1) + " columns");
    params.push_back(v[0]);
    coords.insert(coords.end(), v.begin() + 1, v.end());
  }
  Provenance prov{"file", {}};
  prov.add("path", origin);
  // A file holds a finite sample; nothing is known beyond its last point.
  return Curve::with_measured_chord(ambient, std::move(params), std::move(coords), std::move(prov),
                                    false);
}

Curve read_curve_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read curve file " + path);
  return read_curve(f, path);
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << contents;
  f.close();
  if (!f) throw Error("failed writing " + path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw PreconditionError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw PreconditionError(origin + ":" + std::to_string(lineno) + ": empty key");
    c.values_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(it->second, key);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int(it->second, key);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw PreconditionError(key + ": expected a boolean, got '" + it->second + "'");
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_doubles(it->second, key);
}

double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  // Allow simple fractions such as 1/3.
  if (const auto slash = t.find('/'); slash != std::string::npos && slash > 0)
    return parse_double(t.substr(0, slash), field) / parse_double(t.substr(slash + 1), field);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw PreconditionError(field + ": expected a number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    // Accept integral reals such as 1e6.
    const double d = parse_double(t, field);
    if (d != static_cast<double>(static_cast<long long>(d)))
      throw PreconditionError(field + ": expected an integer, got '" + text + "'");
    return static_cast<long long>(d);
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!trim(item).empty()) out.push_back(parse_double(item, field));
      item.clear();
    } else {
      item += ch;
    }
  }
  return out;
}

}  // namespace spiraldim::io
