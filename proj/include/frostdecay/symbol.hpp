#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frostdecay/measure.hpp"

namespace frostdecay {

using MultiIndex = std::vector<int>;
using Complex = std::complex<double>;

/// Homogeneous constant-coefficient operator A(D) = sum_{|a| = m} c_a d^a
/// from C^dimE-valued to C^dimF-valued functions on R^n.  Each c_a is a
/// dimF x dimE complex matrix.
class OperatorSymbol {
 public:
  using Coefficients = std::map<MultiIndex, Eigen::MatrixXcd>;

  /// Throws unless every multi-index has length n and order m, every matrix
  /// is dimF x dimE, and at least one entry is nonzero.
  OperatorSymbol(int n, int order, int dim_e, int dim_f, Coefficients coefficients);

  int n() const { return n_; }
  int order() const { return order_; }
  int dim_e() const { return dim_e_; }
  int dim_f() const { return dim_f_; }
  const Coefficients& coefficients() const { return coefficients_; }

  /// A(xi) = sum c_a xi^a.
  Eigen::MatrixXcd evaluate(std::span<const double> xi) const;

  /// Formal adjoint A*(D) = sum (-1)^m c_a^H d^a, characterized by
  /// <A(D) phi, psi> = <phi, A*(D) psi> for test functions.
  OperatorSymbol adjoint() const;

  OperatorSymbol scaled(Complex factor) const;

  bool operator==(const OperatorSymbol&) const;

  /// Gradient (dimE = 1, dimF = n): symbol xi as a column.
  static OperatorSymbol gradient(int n);
  /// Laplacian on scalars: symbol |xi|^2.
  static OperatorSymbol laplacian(int n);
  /// d/dx_axis on scalars (axis counted from 1).
  static OperatorSymbol partial(int n, int axis);
  /// `gradient`, `laplacian`, `partial1`, ..., `partialN`.
  static OperatorSymbol builtin(const std::string& name, int n);

 private:
  int n_;
  int order_;
  int dim_e_;
  int dim_f_;
  Coefficients coefficients_;
};

/// Operator file:
///   SYMB n=<n> m=<m> dimE=<dimE> dimF=<dimF>
///   <a_1> ... <a_n> <row> <col> <real> <imag>     one entry per line
/// Rows and columns are 0-based; repeated entries add up.
void write_symbol(std::ostream& out, const OperatorSymbol& op);
OperatorSymbol read_symbol(std::istream& in);

/// Deterministic grid on the unit sphere of R^n (normalized points of the
/// faces of [-1,1]^n, `resolution` points per face edge; for n = 1 the two
/// points +-1) followed by `random_count` seeded uniform points.
PointSet sphere_samples(int n, int resolution, std::size_t random_count, std::uint64_t seed);

inline constexpr double kRankTolerance = 1e-8;

struct EllipticityResult {
  double margin = 0.0;               ///< min smallest singular value over samples
  std::vector<double> witness;       ///< sample attaining the margin
  bool elliptic = false;             ///< margin > tolerance: no counterexample found
  bool rejected_by_dimension = false;  ///< dimE > dimF: never injective
  std::size_t samples = 0;
};

/// Sampling falsifier for injectivity of A(xi), xi != 0.  A margin at or
/// below `tolerance` comes with a witness direction; a larger margin only
/// means no counterexample was sampled.
EllipticityResult ellipticity_margin(const OperatorSymbol& op, const PointSet& samples,
                                     double tolerance = kRankTolerance);

struct CancelingResult {
  int defect = 0;                ///< dimension of the sampled range intersection
  Eigen::MatrixXcd basis;        ///< dimF x defect, orthonormal
  bool indeterminate = false;    ///< some principal angle fell near the tolerance
  std::size_t samples_used = 0;  ///< samples consumed before the intersection vanished
};

/// Intersects the ranges A(xi_1)[E], A(xi_2)[E], ... in sample order and
/// returns the dimension of what is left.  Defect 0 is consistent with the
/// canceling condition; a positive defect is evidence against it.
CancelingResult canceling_defect(const OperatorSymbol& op, const PointSet& samples,
                                 double rank_tolerance = kRankTolerance);

/// Orthonormal basis of the column space (rank relative to the largest
/// singular value).
Eigen::MatrixXcd range_basis(const Eigen::MatrixXcd& a, double rank_tolerance = kRankTolerance);

// --- Weak identity on polynomial-Gaussian test functions -------------------

/// Vector of polynomials, each component sum coeff * x^a, implicitly
/// multiplied by the weight exp(-|x|^2).
struct GaussPolyField {
  int n = 0;
  std::vector<std::map<MultiIndex, Complex>> components;
};

/// Applies a constant-coefficient operator symbolically:
/// d_i(P e^{-|x|^2}) = (d_i P - 2 x_i P) e^{-|x|^2}.
GaussPolyField apply_operator(const OperatorSymbol& op, const GaussPolyField& field);

/// <u, v> = sum_j int u_j conj(v_j) dx, in closed form through Gaussian
/// moments.
Complex l2_pairing(const GaussPolyField& u, const GaussPolyField& v);

/// |<A(D) phi, psi> - <phi, A*(D) psi>| for the given test pair.
double adjoint_identity_defect(const OperatorSymbol& op, const GaussPolyField& phi,
                               const GaussPolyField& psi);

}  // namespace frostdecay
