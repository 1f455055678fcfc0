#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperlab/ball.hpp"
#include "hyperlab/boundary.hpp"
#include "hyperlab/group.hpp"
#include "hyperlab/rational.hpp"

namespace hyperlab {

/// Position of a reduced word among the cylinders of its depth, and back.
/// Index arithmetic matches cylinder_index: the parent of cylinder i at
/// depth d >= 2 is i / (2k-1).
Word cylinder_word(const Group& group, int depth, std::size_t index);

/// Function on the boundary of a free group that is constant on every
/// cylinder of one fixed depth. T is Rational or std::complex<double>.
template <class T>
class BasicStepFunction {
 public:
  /// `values` is indexed by cylinder_index at `depth`.
  BasicStepFunction(Group group, int depth, std::vector<T> values);

  static BasicStepFunction constant(const Group& group, T value);
  /// Indicator of the cylinder C_w.
  static BasicStepFunction indicator(const Group& group, const Word& w);

  const Group& group() const { return group_; }
  int depth() const { return depth_; }
  const std::vector<T>& values() const { return values_; }
  /// Value on the cylinder C_w; requires |w| >= depth().
  T value(const Word& w) const;

  BasicStepFunction refine(int depth) const;
  /// The same function on the smallest depth that represents it.
  BasicStepFunction coarsen() const;
  /// (g.f)(xi) = f(g^-1 xi), represented at depth() + |g|.
  BasicStepFunction translate(const GroupElement& g) const;
  BasicStepFunction conjugate() const;
  bool is_zero() const;

  BasicStepFunction operator+(const BasicStepFunction& other) const;
  BasicStepFunction operator*(const BasicStepFunction& other) const;
  BasicStepFunction scaled(const T& factor) const;
  /// Equality as functions, after refining to a common depth.
  bool operator==(const BasicStepFunction& other) const;

 private:
  Group group_;
  int depth_ = 0;
  std::vector<T> values_;
};

using StepFunction = BasicStepFunction<Rational>;
using ComplexStepFunction = BasicStepFunction<std::complex<double>>;

struct ShortlexLess {
  bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

/// Finite sum of terms f_g g over a free group, with no identically zero term.
template <class T>
class BasicCrossedElement {
 public:
  using Terms = std::map<Word, BasicStepFunction<T>, ShortlexLess>;

  explicit BasicCrossedElement(Group group) : group_(std::move(group)) {}

  static BasicCrossedElement monomial(const BasicStepFunction<T>& f, const GroupElement& g);
  /// 1_boundary times the identity.
  static BasicCrossedElement unit(const Group& group);

  const Group& group() const { return group_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::optional<BasicStepFunction<T>> term(const GroupElement& g) const;

  /// Adds f to the coefficient of g, dropping the term if it cancels.
  void add_term(const GroupElement& g, const BasicStepFunction<T>& f);

  BasicCrossedElement operator+(const BasicCrossedElement& other) const;
  BasicCrossedElement scaled(const T& factor) const;
  bool operator==(const BasicCrossedElement& other) const;

 private:
  Group group_;
  Terms terms_;
};

using CrossedElement = BasicCrossedElement<Rational>;
using ComplexCrossedElement = BasicCrossedElement<std::complex<double>>;

/// (f g)(h k) = f (g.h) gk, extended bilinearly.
template <class T>
BasicCrossedElement<T> cp_multiply(const BasicCrossedElement<T>& a, const BasicCrossedElement<T>& b);

/// (f g)* = (g^-1 . conj f) g^-1.
template <class T>
BasicCrossedElement<T> cp_adjoint(const BasicCrossedElement<T>& a);

/// Real time t or imaginary time i*beta.
struct FlowParameter {
  enum class Kind { real, imaginary };
  Kind kind = Kind::real;
  double value = 0.0;

  static FlowParameter real(double t) { return {Kind::real, t}; }
  static FlowParameter imaginary(double beta) { return {Kind::imaginary, beta}; }
};

/// log(2k - 1) for free:k.
double boundary_dimension(const Group& group);

/// Integer m with beta = m log(2k-1), if there is one (relative tolerance 1e-9).
std::optional<std::int64_t> exact_multiple(const Group& group, double beta);

/// The Busemann flow on exact elements: at s = i m log(2k-1) each coefficient
/// f_g is multiplied by (2k-1)^{-m b(g)}, refined to depth >= |g| + 1.
/// Throws InputError for real time or other beta; use apply_flow_float there.
CrossedElement apply_flow(const CrossedElement& a, const FlowParameter& s);

/// The same flow in floating point: the factor is e^{i t b(g)} for real t and
/// e^{-beta b(g)} for imaginary time.
ComplexCrossedElement apply_flow_float(const ComplexCrossedElement& a, const FlowParameter& s);
ComplexCrossedElement to_complex(const CrossedElement& a);

/// Integral of f against the uniform cylinder measure.
template <class T>
T integrate(const BasicStepFunction<T>& f, const BoundaryMeasure& mu);

/// omega(sum f_g g) = integral of f_1.
template <class T>
T state_omega(const BasicCrossedElement<T>& a, const BoundaryMeasure& mu);

/// omega(ab), computing only the identity coefficient of the product.
Rational omega_of_product(const CrossedElement& a, const CrossedElement& b, const BoundaryMeasure& mu);

struct KmsReport {
  Rational lhs;  // omega(b sigma_{i beta}(a))
  Rational rhs;  // omega(ab)
  bool equal = false;
};

KmsReport kms_check(const CrossedElement& a, const CrossedElement& b, double beta, const BoundaryMeasure& mu);

struct KmsWitness {
  GroupElement g;
  Word cylinder_a;
  GroupElement h;
  Word cylinder_b;
  KmsReport report;
};

struct KmsScanReport {
  double beta = 0.0;
  std::int64_t multiple = 0;
  int radius = 0;
  int depth = 0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t unequal_pairs = 0;
  /// Pairs whose group parts multiply to the identity (the others give 0 = 0).
  std::uint64_t paired_terms = 0;
  std::optional<KmsWitness> first_unequal;
  bool all_equal() const { return unequal_pairs == 0; }
};

/// kms_check on every pair (1_{C_v} g, 1_{C_w} h) with g, h in the radius
/// ball and v, w cylinders of the given depth.
KmsScanReport kms_scan(const Group& group, int radius, int depth, double beta);

struct NonvanishingRecord {
  GroupElement g;
  std::int64_t translation_length = 0;
  std::int64_t at_attracting = 0;  // b(g)(g+)
  std::int64_t at_repelling = 0;   // b(g)(g-)
  bool passed = false;
};

struct NonvanishingReport {
  std::vector<NonvanishingRecord> records;
  std::size_t failures = 0;
  std::string note;
  bool passed() const { return failures == 0; }
};

/// b(g)(g+) > 0 > b(g)(g-) for every non-identity g of the ball, with
/// b(g)(g+) equal to the translation length.
NonvanishingReport nonvanishing_certificate(const Ball& ball);

struct TermRecord {
  std::string word;
  std::vector<std::pair<std::string, Rational>> values;
};

/// (group word, [(cylinder, value)]) per term at the coarsest depth, zero
/// cylinders omitted.
std::vector<TermRecord> serialize(const CrossedElement& a);

}  // namespace hyperlab
