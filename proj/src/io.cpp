#include "frostdecay/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace frostdecay {

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (sep == ' ') {
    std::istringstream is(text);
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& tok, std::size_t line) {
  std::string t = tok;
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
  if (!t.empty() && t.front() == '+') t.erase(t.begin());
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParseError(line, "malformed number '" + tok + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, "non-finite number '" + tok + "'");
  return v;
}

std::int64_t parse_int(const std::string& tok, std::size_t line) {
  std::int64_t v = 0;
  const char* begin = tok.data();
  if (!tok.empty() && tok.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || begin == tok.data() + tok.size()) {
    throw ParseError(line, "malformed integer '" + tok + "'");
  }
  return v;
}

// Reads the first non-blank, non-comment line as `TAG key=value ...`.
std::map<std::string, std::string> read_header(std::istream& in, const std::string& tag,
                                               std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split(strip_comment(line), ' ');
    if (toks.empty()) continue;
    if (toks.front() != tag) throw ParseError(line_no, "expected '" + tag + "' header");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const auto eq = toks[i].find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ParseError(line_no, "malformed header field '" + toks[i] + "'");
      }
      if (!kv.emplace(toks[i].substr(0, eq), toks[i].substr(eq + 1)).second) {
        throw ParseError(line_no, "repeated header field '" + toks[i] + "'");
      }
    }
    return kv;
  }
  throw ParseError(line_no, "missing '" + tag + "' header");
}

const std::string& require_key(const std::map<std::string, std::string>& kv,
                               const std::string& key, std::size_t line) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(line, "header lacks '" + key + "='");
  return it->second;
}

std::size_t parse_dim(const std::map<std::string, std::string>& kv, std::size_t line) {
  const auto n = parse_int(require_key(kv, "n", line), line);
  if (n < 1 || n > 64) throw ParseError(line, "dimension n must lie in [1, 64]");
  return static_cast<std::size_t>(n);
}

template <class Stream>
Stream open_or_throw(const std::filesystem::path& path) {
  Stream s(path);
  if (!s) throw std::runtime_error("cannot open '" + path.string() + "'");
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_measure(std::ostream& out, const AtomicMeasure& mu) {
  out << "MEAS n=" << mu.dim() << " rmin=" << format_double(mu.r_min()) << '\n';
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double c : mu.position(i)) out << format_double(c) << ' ';
    out << format_double(mu.mass(i)) << '\n';
  }
}

AtomicMeasure read_measure(std::istream& in) {
  std::size_t line_no = 0;
  const auto kv = read_header(in, "MEAS", line_no);
  const std::size_t header_line = line_no;
  const std::size_t n = parse_dim(kv, header_line);
  const double r_min = parse_double(require_key(kv, "rmin", header_line), header_line);
  if (!(r_min > 0.0)) throw ParseError(header_line, "rmin must be positive");

  std::vector<double> positions;
  std::vector<double> masses;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split(strip_comment(line), ' ');
    if (toks.empty()) continue;
    if (toks.size() != n + 1) {
      throw ParseError(line_no, "expected " + std::to_string(n + 1) + " fields (n=" +
                                    std::to_string(n) + " coordinates and a mass), got " +
                                    std::to_string(toks.size()));
    }
    for (std::size_t i = 0; i < n; ++i) positions.push_back(parse_double(toks[i], line_no));
    const double m = parse_double(toks[n], line_no);
    if (!(m > 0.0)) throw ParseError(line_no, "atom mass must be positive, got " + toks[n]);
    masses.push_back(m);
  }
  try {
    return {n, std::move(positions), std::move(masses), r_min};
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
}

void write_cubeset(std::ostream& out, const CubeSet& set) {
  out << "CUBES n=" << set.dim() << " level=" << set.level() << '\n';
  for (const auto& m : set.members()) {
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? " " : "") << m[i];
    out << '\n';
  }
}

CubeSet read_cubeset(std::istream& in) {
  std::size_t line_no = 0;
  const auto kv = read_header(in, "CUBES", line_no);
  const std::size_t header_line = line_no;
  const std::size_t n = parse_dim(kv, header_line);
  const auto level = parse_int(require_key(kv, "level", header_line), header_line);
  if (level < 0 || level > kMaxDyadicLevel) throw ParseError(header_line, "level out of range");

  std::vector<CubeIndex> members;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split(strip_comment(line), ' ');
    if (toks.empty()) continue;
    if (toks.size() != n) {
      throw ParseError(line_no, "expected " + std::to_string(n) + " indices, got " +
                                    std::to_string(toks.size()));
    }
    CubeIndex idx;
    for (const auto& t : toks) idx.push_back(parse_int(t, line_no));
    members.push_back(std::move(idx));
  }
  try {
    return {n, static_cast<int>(level), std::move(members)};
  } catch (const std::exception& e) {
    throw ParseError(line_no, e.what());
  }
}

void write_field_samples(std::ostream& out, const FieldSamples& field) {
  const std::size_t n = field.dim;
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << 'x' << i + 1;
  for (std::size_t i = 0; i < n; ++i) out << ",f" << i + 1;
  out << '\n';
  for (std::size_t k = 0; k < field.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << format_double(field.points[k * n + i]);
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(field.values[k * n + i]);
    out << '\n';
  }
}

FieldSamples read_field_samples(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing field sample header");
  ++line_no;
  const auto head = split(line, ',');
  if (head.size() < 2 || head.size() % 2 != 0) throw ParseError(1, "malformed field sample header");
  FieldSamples field;
  field.dim = head.size() / 2;
  for (std::size_t i = 0; i < field.dim; ++i) {
    if (head[i] != "x" + std::to_string(i + 1) || head[field.dim + i] != "f" + std::to_string(i + 1)) {
      throw ParseError(1, "field sample header must read x1,...,xn,f1,...,fn");
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2 * field.dim) throw ParseError(line_no, "wrong column count");
    for (std::size_t i = 0; i < field.dim; ++i) field.points.push_back(parse_double(cols[i], line_no));
    for (std::size_t i = 0; i < field.dim; ++i) {
      field.values.push_back(parse_double(cols[field.dim + i], line_no));
    }
  }
  return field;
}

AtomicMeasure load_measure(const std::filesystem::path& path) {
  auto in = open_or_throw<std::ifstream>(path);
  return read_measure(in);
}

void save_measure(const std::filesystem::path& path, const AtomicMeasure& mu) {
  auto out = open_or_throw<std::ofstream>(path);
  write_measure(out, mu);
}

CubeSet load_cubeset(const std::filesystem::path& path) {
  auto in = open_or_throw<std::ifstream>(path);
  return read_cubeset(in);
}

void save_cubeset(const std::filesystem::path& path, const CubeSet& set) {
  auto out = open_or_throw<std::ofstream>(path);
  write_cubeset(out, set);
}

}  // namespace frostdecay
