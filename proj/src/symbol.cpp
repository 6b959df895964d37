#include "frostdecay/symbol.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "frostdecay/io.hpp"
#include "frostdecay/rng.hpp"

namespace frostdecay {

namespace {

MultiIndex unit_index(int n, int axis, int power = 1) {
  MultiIndex a(n, 0);
  a[axis] = power;
  return a;
}

double monomial(const MultiIndex& a, std::span<const double> xi) {
  double v = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int p = 0; p < a[i]; ++p) v *= xi[i];
  }
  return v;
}

using Poly = std::map<MultiIndex, Complex>;

// d_i (P e^{-|x|^2}) = (d_i P - 2 x_i P) e^{-|x|^2}
Poly derive_weighted(const Poly& p, int axis) {
  Poly out;
  for (const auto& [a, c] : p) {
    if (a[axis] > 0) {
      MultiIndex b = a;
      --b[axis];
      out[b] += c * static_cast<double>(a[axis]);
    }
    MultiIndex b = a;
    ++b[axis];
    out[b] += -2.0 * c;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == Complex(0.0); });
  return out;
}

// int t^k exp(-2 t^2) dt
double gaussian_moment(int k) {
  if (k % 2 != 0) return 0.0;
  return std::tgamma((k + 1) / 2.0) * std::exp2(-(k + 1) / 2.0);
}

std::int64_t parse_int_token(const std::string& tok, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "malformed integer '" + tok + "'");
  }
  return v;
}

double parse_double_token(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line, "malformed number '" + tok + "'");
  }
  return v;
}

}  // namespace

OperatorSymbol::OperatorSymbol(int n, int order, int dim_e, int dim_f, Coefficients coefficients)
    : n_(n), order_(order), dim_e_(dim_e), dim_f_(dim_f), coefficients_(std::move(coefficients)) {
  if (n_ < 1 || order_ < 1 || dim_e_ < 1 || dim_f_ < 1) {
    throw std::invalid_argument("operator needs n, m, dimE, dimF >= 1");
  }
  bool nonzero = false;
  for (const auto& [a, c] : coefficients_) {
    if (static_cast<int>(a.size()) != n_) throw std::invalid_argument("multi-index length differs from n");
    if (std::any_of(a.begin(), a.end(), [](int v) { return v < 0; }) ||
        std::accumulate(a.begin(), a.end(), 0) != order_) {
      throw std::invalid_argument("operator is not homogeneous: multi-index of order != m");
    }
    if (c.rows() != dim_f_ || c.cols() != dim_e_) {
      throw std::invalid_argument("coefficient matrix is not dimF x dimE");
    }
    nonzero = nonzero || !c.isZero(0.0);
  }
  if (!nonzero) throw std::invalid_argument("operator has no nonzero coefficient");
}

Eigen::MatrixXcd OperatorSymbol::evaluate(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != n_) throw std::invalid_argument("xi arity differs from n");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim_f_, dim_e_);
  for (const auto& [alpha, c] : coefficients_) a += monomial(alpha, xi) * c;
  return a;
}

OperatorSymbol OperatorSymbol::adjoint() const {
  const double sign = (order_ % 2 == 0) ? 1.0 : -1.0;
  Coefficients adj;
  for (const auto& [alpha, c] : coefficients_) adj.emplace(alpha, sign * c.adjoint());
  return {n_, order_, dim_f_, dim_e_, std::move(adj)};
}

OperatorSymbol OperatorSymbol::scaled(Complex factor) const {
  Coefficients out;
  for (const auto& [alpha, c] : coefficients_) out.emplace(alpha, factor * c);
  return {n_, order_, dim_e_, dim_f_, std::move(out)};
}

bool OperatorSymbol::operator==(const OperatorSymbol& other) const {
  if (n_ != other.n_ || order_ != other.order_ || dim_e_ != other.dim_e_ || dim_f_ != other.dim_f_ ||
      coefficients_.size() != other.coefficients_.size()) {
    return false;
  }
  for (const auto& [alpha, c] : coefficients_) {
    const auto it = other.coefficients_.find(alpha);
    if (it == other.coefficients_.end() || it->second != c) return false;
  }
  return true;
}

OperatorSymbol OperatorSymbol::gradient(int n) {
  Coefficients c;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, 1);
    e(i, 0) = 1.0;
    c.emplace(unit_index(n, i), e);
  }
  return {n, 1, 1, n, std::move(c)};
}

OperatorSymbol OperatorSymbol::laplacian(int n) {
  Coefficients c;
  for (int i = 0; i < n; ++i) c.emplace(unit_index(n, i, 2), Eigen::MatrixXcd::Ones(1, 1));
  return {n, 2, 1, 1, std::move(c)};
}

OperatorSymbol OperatorSymbol::partial(int n, int axis) {
  if (axis < 1 || axis > n) throw std::invalid_argument("partial derivative axis out of range");
  Coefficients c;
  c.emplace(unit_index(n, axis - 1), Eigen::MatrixXcd::Ones(1, 1));
  return {n, 1, 1, 1, std::move(c)};
}

OperatorSymbol OperatorSymbol::builtin(const std::string& name, int n) {
  if (name == "gradient") return gradient(n);
  if (name == "laplacian") return laplacian(n);
  if (name.rfind("partial", 0) == 0 && name.size() > 7) {
    int axis = 0;
    const auto [ptr, ec] = std::from_chars(name.data() + 7, name.data() + name.size(), axis);
    if (ec == std::errc() && ptr == name.data() + name.size()) return partial(n, axis);
  }
  throw std::invalid_argument("unknown built-in operator '" + name + "'");
}

void write_symbol(std::ostream& out, const OperatorSymbol& op) {
  out << "SYMB n=" << op.n() << " m=" << op.order() << " dimE=" << op.dim_e()
      << " dimF=" << op.dim_f() << '\n';
  for (const auto& [alpha, c] : op.coefficients()) {
    for (int r = 0; r < c.rows(); ++r) {
      for (int k = 0; k < c.cols(); ++k) {
        if (c(r, k) == Complex(0.0)) continue;
        for (int a : alpha) out << a << ' ';
        out << r << ' ' << k << ' ' << format_double(c(r, k).real()) << ' '
            << format_double(c(r, k).imag()) << '\n';
      }
    }
  }
}

OperatorSymbol read_symbol(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, int> header;
  auto tokens = [](const std::string& l) {
    std::vector<std::string> t;
    std::istringstream is(l.substr(0, l.find('#')));
    for (std::string s; is >> s;) t.push_back(s);
    return t;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t.front() != "SYMB") throw ParseError(line_no, "expected 'SYMB' header");
    for (std::size_t i = 1; i < t.size(); ++i) {
      const auto eq = t[i].find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "malformed header field '" + t[i] + "'");
      header[t[i].substr(0, eq)] = static_cast<int>(parse_int_token(t[i].substr(eq + 1), line_no));
    }
    break;
  }
  for (const char* key : {"n", "m", "dimE", "dimF"}) {
    if (!header.count(key)) throw ParseError(line_no, std::string("header lacks '") + key + "='");
  }
  const int n = header["n"];
  const int dim_e = header["dimE"];
  const int dim_f = header["dimF"];
  if (n < 1 || dim_e < 1 || dim_f < 1 || header["m"] < 1) {
    throw ParseError(line_no, "header values must be positive");
  }

  OperatorSymbol::Coefficients coeffs;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (static_cast<int>(t.size()) != n + 4) {
      throw ParseError(line_no, "expected " + std::to_string(n + 4) +
                                    " fields (multi-index, row, col, real, imag)");
    }
    MultiIndex alpha(n);
    for (int i = 0; i < n; ++i) alpha[i] = static_cast<int>(parse_int_token(t[i], line_no));
    const auto row = parse_int_token(t[n], line_no);
    const auto col = parse_int_token(t[n + 1], line_no);
    if (row < 0 || row >= dim_f || col < 0 || col >= dim_e) {
      throw ParseError(line_no, "coefficient entry outside the dimF x dimE matrix");
    }
    auto it = coeffs.try_emplace(alpha, Eigen::MatrixXcd::Zero(dim_f, dim_e)).first;
    it->second(row, col) += Complex(parse_double_token(t[n + 2], line_no),
                                    parse_double_token(t[n + 3], line_no));
  }
  try {
    return {n, header["m"], dim_e, dim_f, std::move(coeffs)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
}

PointSet sphere_samples(int n, int resolution, std::size_t random_count, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sphere dimension must be positive");
  if (resolution < 2 && n > 1) throw std::invalid_argument("sphere grid resolution must be >= 2");
  PointSet pts(static_cast<std::size_t>(n), {});
  std::vector<double> p(n);
  if (n == 1) {
    pts.push_back(std::vector<double>{-1.0});
    pts.push_back(std::vector<double>{1.0});
  } else {
    for (int axis = 0; axis < n; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        std::vector<int> k(n - 1, 0);
        while (true) {
          for (int i = 0, j = 0; i < n; ++i) {
            p[i] = (i == axis) ? sign : -1.0 + 2.0 * k[j++] / (resolution - 1);
          }
          const double r = norm(p);
          for (auto& v : p) v /= r;
          pts.push_back(p);
          int d = n - 1;
          while (d > 0 && k[d - 1] == resolution - 1) k[--d] = 0;
          if (d == 0) break;
          ++k[d - 1];
        }
      }
    }
  }
  Rng rng(seed);
  for (std::size_t s = 0; s < random_count; ++s) {
    double r = 0.0;
    do {
      for (auto& v : p) v = rng.normal();
      r = norm(p);
    } while (r == 0.0);
    for (auto& v : p) v /= r;
    pts.push_back(p);
  }
  return pts;
}

Eigen::MatrixXcd range_basis(const Eigen::MatrixXcd& a, double rank_tolerance) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    while (rank < sv.size() && sv(rank) > rank_tolerance * sv(0)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

EllipticityResult ellipticity_margin(const OperatorSymbol& op, const PointSet& samples,
                                     double tolerance) {
  if (samples.empty()) throw std::invalid_argument("ellipticity check needs samples");
  if (static_cast<int>(samples.dim()) != op.n()) throw std::invalid_argument("sample arity differs from n");
  EllipticityResult res;
  if (op.dim_e() > op.dim_f()) {
    res.rejected_by_dimension = true;
    return res;
  }
  res.samples = samples.size();
  res.margin = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(op.evaluate(samples.point(i)));
    const auto& sv = svd.singularValues();
    scale = std::max(scale, sv(0));
    const double smallest = sv(sv.size() - 1);
    if (smallest < res.margin) {
      res.margin = smallest;
      const auto w = samples.point(i);
      res.witness.assign(w.begin(), w.end());
    }
  }
  res.elliptic = res.margin > tolerance * scale;
  return res;
}

CancelingResult canceling_defect(const OperatorSymbol& op, const PointSet& samples,
                                 double rank_tolerance) {
  if (samples.size() < 2) throw std::invalid_argument("canceling check needs at least two samples");
  if (static_cast<int>(samples.dim()) != op.n()) throw std::invalid_argument("sample arity differs from n");
  CancelingResult res;
  Eigen::MatrixXcd u = range_basis(op.evaluate(samples.point(0)), rank_tolerance);
  res.samples_used = 1;
  for (std::size_t i = 1; i < samples.size() && u.cols() > 0; ++i) {
    ++res.samples_used;
    const Eigen::MatrixXcd v = range_basis(op.evaluate(samples.point(i)), rank_tolerance);
    // Component of span(u) orthogonal to span(v); its singular values are
    // the sines of the principal angles.
    const Eigen::MatrixXcd residual = u - v * (v.adjoint() * u);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(residual, Eigen::ComputeFullV);
    const auto& sines = svd.singularValues();
    const Eigen::MatrixXcd& w = svd.matrixV();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      const double s = k < sines.size() ? sines(k) : 0.0;
      if (s <= rank_tolerance) {
        keep.push_back(k);
      } else if (s <= 100.0 * rank_tolerance) {
        res.indeterminate = true;
      }
    }
    Eigen::MatrixXcd next(u.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) next.col(k) = u * w.col(keep[k]);
    if (next.cols() > 0) {
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(next);
      next = qr.householderQ() * Eigen::MatrixXcd::Identity(next.rows(), next.cols());
    }
    u = std::move(next);
  }
  res.defect = static_cast<int>(u.cols());
  res.basis = u;
  return res;
}

GaussPolyField apply_operator(const OperatorSymbol& op, const GaussPolyField& field) {
  if (field.n != op.n() || static_cast<int>(field.components.size()) != op.dim_e()) {
    throw std::invalid_argument("test field does not match the operator's domain");
  }
  GaussPolyField out;
  out.n = op.n();
  out.components.assign(op.dim_f(), {});
  for (const auto& [alpha, c] : op.coefficients()) {
    for (int k = 0; k < op.dim_e(); ++k) {
      Poly d = field.components[k];
      for (int axis = 0; axis < op.n(); ++axis) {
        for (int p = 0; p < alpha[axis]; ++p) d = derive_weighted(d, axis);
      }
      for (int r = 0; r < op.dim_f(); ++r) {
        if (c(r, k) == Complex(0.0)) continue;
        for (const auto& [mono, v] : d) out.components[r][mono] += c(r, k) * v;
      }
    }
  }
  return out;
}

Complex l2_pairing(const GaussPolyField& u, const GaussPolyField& v) {
  if (u.n != v.n || u.components.size() != v.components.size()) {
    throw std::invalid_argument("paired fields have different shapes");
  }
  Complex total = 0.0;
  for (std::size_t j = 0; j < u.components.size(); ++j) {
    for (const auto& [a, cu] : u.components[j]) {
      for (const auto& [b, cv] : v.components[j]) {
        double moment = 1.0;
        for (int i = 0; i < u.n && moment != 0.0; ++i) moment *= gaussian_moment(a[i] + b[i]);
        total += cu * std::conj(cv) * moment;
      }
    }
  }
  return total;
}

double adjoint_identity_defect(const OperatorSymbol& op, const GaussPolyField& phi,
                               const GaussPolyField& psi) {
  const Complex lhs = l2_pairing(apply_operator(op, phi), psi);
  const Complex rhs = l2_pairing(phi, apply_operator(op.adjoint(), psi));
  return std::abs(lhs - rhs);
}

}  // namespace frostdecay
