#include "hyperlab/crossed_product.hpp"

#include <algorithm>
#include <cmath>

#include "hyperlab/errors.hpp"

namespace hyperlab {

namespace {

void require_free(const Group& group) {
  if (group.kind() != PresentationKind::free || group.free_rank() < 1) {
    throw UnsupportedError("the crossed product is only implemented over free groups (got " + group.spec() + ")");
  }
}

void require_same(const Group& a, const Group& b) {
  if (!(a == b)) throw InputError("operands belong to different groups");
}

std::size_t branching(const Group& group) { return group.alphabet().size() - 1; }

std::size_t power(std::size_t base, int exponent) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

std::size_t prefix_index(const Group& group, const Word& w, int depth) {
  return cylinder_index(group, Word(w.begin(), w.begin() + depth));
}

std::int64_t busemann_on_cylinder(const Word& g, const Word& w) {
  std::size_t lcp = 0;
  while (lcp < g.size() && lcp < w.size() && g[lcp] == w[lcp]) ++lcp;
  return 2 * static_cast<std::int64_t>(lcp) - static_cast<std::int64_t>(g.size());
}

template <class T>
T conj_value(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v;
  } else {
    return std::conj(v);
  }
}

}  // namespace

Word cylinder_word(const Group& group, int depth, std::size_t index) {
  require_free(group);
  if (depth < 0) throw InputError("cylinder depth must be non-negative");
  if (depth == 0) return {};
  if (index >= cylinder_count(group.free_rank(), depth)) throw InputError("cylinder index out of range");
  const auto& alpha = group.alphabet();
  const std::size_t b = branching(group);
  std::size_t scale = power(b, depth - 1);
  Word w;
  w.reserve(static_cast<std::size_t>(depth));
  w.push_back(static_cast<Symbol>(index / scale));
  index %= scale;
  for (int i = 1; i < depth; ++i) {
    scale /= b;
    const auto r = static_cast<Symbol>(index / scale);
    index %= scale;
    const Symbol forbidden = alpha.inverse(w.back());
    w.push_back(r < forbidden ? r : static_cast<Symbol>(r + 1));
  }
  return w;
}

// ---------------------------------------------------------------------------
// Step functions

template <class T>
BasicStepFunction<T>::BasicStepFunction(Group group, int depth, std::vector<T> values)
    : group_(std::move(group)), depth_(depth), values_(std::move(values)) {
  require_free(group_);
  if (depth_ < 0) throw InputError("step function depth must be non-negative");
  if (values_.size() != cylinder_count(group_.free_rank(), depth_)) {
    throw InputError("step function needs one value per cylinder of its depth");
  }
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::constant(const Group& group, T value) {
  return BasicStepFunction(group, 0, {value});
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::indicator(const Group& group, const Word& w) {
  require_free(group);
  if (free_reduce(group.alphabet(), w) != w) throw InputError("cylinder word is not reduced");
  const int depth = static_cast<int>(w.size());
  std::vector<T> values(cylinder_count(group.free_rank(), depth), T{});
  values[cylinder_index(group, w)] = T{1};
  return BasicStepFunction(group, depth, std::move(values));
}

template <class T>
T BasicStepFunction<T>::value(const Word& w) const {
  if (static_cast<int>(w.size()) < depth_) {
    throw InputError("cylinder " + group_.alphabet().format(w) + " is coarser than the step function");
  }
  return values_[prefix_index(group_, w, depth_)];
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::refine(int depth) const {
  if (depth < depth_) throw InputError("refinement cannot lower the depth");
  if (depth == depth_) return *this;
  const std::size_t n = cylinder_count(group_.free_rank(), depth);
  std::vector<T> out(n);
  if (depth_ == 0) {
    std::fill(out.begin(), out.end(), values_[0]);
  } else {
    const std::size_t factor = power(branching(group_), depth - depth_);
    for (std::size_t i = 0; i < n; ++i) out[i] = values_[i / factor];
  }
  return BasicStepFunction(group_, depth, std::move(out));
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::coarsen() const {
  const std::size_t b = branching(group_);
  int depth = depth_;
  std::vector<T> values = values_;
  while (depth >= 2 && b > 0) {
    bool uniform = true;
    for (std::size_t i = 0; i < values.size() && uniform; ++i) uniform = values[i] == values[i - i % b];
    if (!uniform) break;
    std::vector<T> next(values.size() / b);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = values[i * b];
    values = std::move(next);
    --depth;
  }
  if (depth == 1 && std::all_of(values.begin(), values.end(), [&](const T& v) { return v == values[0]; })) {
    values = {values[0]};
    depth = 0;
  }
  return BasicStepFunction(group_, depth, std::move(values));
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::translate(const GroupElement& g) const {
  if (g.group_id != group_.id()) throw InputError("element belongs to a different group");
  if (g.empty() || depth_ == 0) return *this;
  const auto& alpha = group_.alphabet();
  const Word g_inv = inverse_word(alpha, g.word);
  const int depth = depth_ + static_cast<int>(g.size());
  const std::size_t n = cylinder_count(group_.free_rank(), depth);
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Word x = g_inv;
    const Word w = cylinder_word(group_, depth, i);
    x.insert(x.end(), w.begin(), w.end());
    out[i] = values_[prefix_index(group_, free_reduce(alpha, x), depth_)];
  }
  return BasicStepFunction(group_, depth, std::move(out));
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::conjugate() const {
  std::vector<T> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](const T& v) { return conj_value(v); });
  return BasicStepFunction(group_, depth_, std::move(out));
}

template <class T>
bool BasicStepFunction<T>::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const T& v) { return v == T{}; });
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::operator+(const BasicStepFunction& other) const {
  require_same(group_, other.group_);
  const int depth = std::max(depth_, other.depth_);
  auto out = refine(depth);
  const auto rhs = other.refine(depth);
  for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] += rhs.values_[i];
  return out;
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::operator*(const BasicStepFunction& other) const {
  require_same(group_, other.group_);
  const int depth = std::max(depth_, other.depth_);
  auto out = refine(depth);
  const auto rhs = other.refine(depth);
  for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] *= rhs.values_[i];
  return out;
}

template <class T>
BasicStepFunction<T> BasicStepFunction<T>::scaled(const T& factor) const {
  auto out = *this;
  for (auto& v : out.values_) v *= factor;
  return out;
}

template <class T>
bool BasicStepFunction<T>::operator==(const BasicStepFunction& other) const {
  if (!(group_ == other.group_)) return false;
  const int depth = std::max(depth_, other.depth_);
  return refine(depth).values_ == other.refine(depth).values_;
}

// ---------------------------------------------------------------------------
// Crossed elements

template <class T>
BasicCrossedElement<T> BasicCrossedElement<T>::monomial(const BasicStepFunction<T>& f, const GroupElement& g) {
  BasicCrossedElement out(f.group());
  out.add_term(g, f);
  return out;
}

template <class T>
BasicCrossedElement<T> BasicCrossedElement<T>::unit(const Group& group) {
  return monomial(BasicStepFunction<T>::constant(group, T{1}), group.identity());
}

template <class T>
std::optional<BasicStepFunction<T>> BasicCrossedElement<T>::term(const GroupElement& g) const {
  const auto it = terms_.find(g.word);
  if (it == terms_.end()) return std::nullopt;
  return it->second;
}

template <class T>
void BasicCrossedElement<T>::add_term(const GroupElement& g, const BasicStepFunction<T>& f) {
  require_same(group_, f.group());
  if (g.group_id != group_.id()) throw InputError("element belongs to a different group");
  const auto it = terms_.find(g.word);
  auto sum = (it == terms_.end() ? f : it->second + f).coarsen();
  if (sum.is_zero()) {
    if (it != terms_.end()) terms_.erase(it);
    return;
  }
  if (it == terms_.end()) {
    terms_.emplace(g.word, std::move(sum));
  } else {
    it->second = std::move(sum);
  }
}

template <class T>
BasicCrossedElement<T> BasicCrossedElement<T>::operator+(const BasicCrossedElement& other) const {
  require_same(group_, other.group_);
  auto out = *this;
  for (const auto& [w, f] : other.terms_) out.add_term(GroupElement{w, group_.id()}, f);
  return out;
}

template <class T>
BasicCrossedElement<T> BasicCrossedElement<T>::scaled(const T& factor) const {
  BasicCrossedElement out(group_);
  for (const auto& [w, f] : terms_) out.add_term(GroupElement{w, group_.id()}, f.scaled(factor));
  return out;
}

template <class T>
bool BasicCrossedElement<T>::operator==(const BasicCrossedElement& other) const {
  if (!(group_ == other.group_) || terms_.size() != other.terms_.size()) return false;
  for (const auto& [w, f] : terms_) {
    const auto it = other.terms_.find(w);
    if (it == other.terms_.end() || !(it->second == f)) return false;
  }
  return true;
}

template <class T>
BasicCrossedElement<T> cp_multiply(const BasicCrossedElement<T>& a, const BasicCrossedElement<T>& b) {
  require_same(a.group(), b.group());
  const auto& G = a.group();
  BasicCrossedElement<T> out(G);
  for (const auto& [gw, f] : a.terms()) {
    const GroupElement g{gw, G.id()};
    for (const auto& [hw, psi] : b.terms()) {
      const GroupElement h{hw, G.id()};
      out.add_term(G.multiply(g, h), f * psi.translate(g));
    }
  }
  return out;
}

template <class T>
BasicCrossedElement<T> cp_adjoint(const BasicCrossedElement<T>& a) {
  const auto& G = a.group();
  BasicCrossedElement<T> out(G);
  for (const auto& [gw, f] : a.terms()) {
    const auto g_inv = G.invert(GroupElement{gw, G.id()});
    out.add_term(g_inv, f.conjugate().translate(g_inv));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flow

double boundary_dimension(const Group& group) {
  require_free(group);
  return BoundaryMeasure{group.free_rank()}.dimension();
}

std::optional<std::int64_t> exact_multiple(const Group& group, double beta) {
  if (!std::isfinite(beta)) return std::nullopt;
  const double D = boundary_dimension(group);
  if (D == 0.0) {
    if (beta == 0.0) return 0;
    return std::nullopt;
  }
  const double m = std::round(beta / D);
  if (std::abs(beta - m * D) > 1e-9 * std::max(1.0, std::abs(beta))) return std::nullopt;
  return static_cast<std::int64_t>(m);
}

CrossedElement apply_flow(const CrossedElement& a, const FlowParameter& s) {
  const auto& G = a.group();
  if (s.kind != FlowParameter::Kind::imaginary) {
    throw InputError("the real-time flow has no exact form; use float mode");
  }
  const auto m = exact_multiple(G, s.value);
  if (!m) {
    throw InputError("beta = " + std::to_string(s.value) +
                     " is not an integer multiple of log(2k-1), so the flow is not rational; use float mode");
  }
  const auto base = 2 * static_cast<std::int64_t>(G.free_rank()) - 1;
  CrossedElement out(G);
  for (const auto& [gw, f] : a.terms()) {
    const int depth = std::max(f.depth(), static_cast<int>(gw.size()) + 1);
    auto values = f.refine(depth).values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto b = busemann_on_cylinder(gw, cylinder_word(G, depth, i));
      values[i] *= rational_power(base, -*m * b);
    }
    out.add_term(GroupElement{gw, G.id()}, StepFunction(G, depth, std::move(values)));
  }
  return out;
}

ComplexCrossedElement apply_flow_float(const ComplexCrossedElement& a, const FlowParameter& s) {
  if (!std::isfinite(s.value)) throw InputError("flow parameter must be finite");
  const auto& G = a.group();
  ComplexCrossedElement out(G);
  for (const auto& [gw, f] : a.terms()) {
    const int depth = std::max(f.depth(), static_cast<int>(gw.size()) + 1);
    auto values = f.refine(depth).values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto b = static_cast<double>(busemann_on_cylinder(gw, cylinder_word(G, depth, i)));
      const std::complex<double> factor = s.kind == FlowParameter::Kind::real
                                              ? std::polar(1.0, s.value * b)
                                              : std::complex<double>(std::exp(-s.value * b), 0.0);
      values[i] *= factor;
    }
    out.add_term(GroupElement{gw, G.id()}, ComplexStepFunction(G, depth, std::move(values)));
  }
  return out;
}

ComplexCrossedElement to_complex(const CrossedElement& a) {
  const auto& G = a.group();
  ComplexCrossedElement out(G);
  for (const auto& [gw, f] : a.terms()) {
    std::vector<std::complex<double>> values;
    values.reserve(f.values().size());
    for (const auto& v : f.values()) {
      values.emplace_back(static_cast<double>(v.numerator()) / static_cast<double>(v.denominator()), 0.0);
    }
    out.add_term(GroupElement{gw, G.id()}, ComplexStepFunction(G, f.depth(), std::move(values)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// State and KMS

template <class T>
T integrate(const BasicStepFunction<T>& f, const BoundaryMeasure& mu) {
  if (mu.rank != f.group().free_rank()) throw InputError("measure rank does not match the group");
  T sum{};
  for (const auto& v : f.values()) sum += v;
  const auto n = cylinder_count(mu.rank, f.depth());
  if constexpr (std::is_same_v<T, Rational>) {
    return sum / Rational(static_cast<std::int64_t>(n));
  } else {
    return sum / static_cast<double>(n);
  }
}

template <class T>
T state_omega(const BasicCrossedElement<T>& a, const BoundaryMeasure& mu) {
  const auto f = a.term(a.group().identity());
  if (!f) return T{};
  return integrate(*f, mu);
}

Rational omega_of_product(const CrossedElement& a, const CrossedElement& b, const BoundaryMeasure& mu) {
  require_same(a.group(), b.group());
  const auto& G = a.group();
  Rational sum(0);
  for (const auto& [gw, f] : a.terms()) {
    const GroupElement g{gw, G.id()};
    const auto psi = b.term(G.invert(g));
    if (psi) sum += integrate(f * psi->translate(g), mu);
  }
  return sum;
}

KmsReport kms_check(const CrossedElement& a, const CrossedElement& b, double beta, const BoundaryMeasure& mu) {
  KmsReport report;
  report.lhs = omega_of_product(b, apply_flow(a, FlowParameter::imaginary(beta)), mu);
  report.rhs = omega_of_product(a, b, mu);
  report.equal = report.lhs == report.rhs;
  return report;
}

KmsScanReport kms_scan(const Group& group, int radius, int depth, double beta) {
  require_free(group);
  if (radius < 0 || depth < 0) throw InputError("KMS scan radius and depth must be non-negative");
  const auto m = exact_multiple(group, beta);
  if (!m) throw InputError("KMS scan needs beta to be an integer multiple of log(2k-1)");
  const BoundaryMeasure mu{group.free_rank()};
  const Ball ball(group, radius, BallOptions{1'000'000, false});
  const auto cyl = cylinders(group, depth);

  struct Monomial {
    std::size_t element;
    std::size_t cylinder;
    CrossedElement value;
    CrossedElement flowed;
  };
  std::vector<Monomial> monomials;
  monomials.reserve(ball.size() * cyl.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (std::size_t c = 0; c < cyl.size(); ++c) {
      auto A = CrossedElement::monomial(StepFunction::indicator(group, cyl[c]), ball.element(i));
      auto flowed = apply_flow(A, FlowParameter::imaginary(beta));
      monomials.push_back(Monomial{i, c, std::move(A), std::move(flowed)});
    }
  }

  KmsScanReport report;
  report.beta = beta;
  report.multiple = *m;
  report.radius = radius;
  report.depth = depth;
  for (const auto& A : monomials) {
    for (const auto& B : monomials) {
      ++report.pairs_checked;
      const auto& g = ball.element(A.element);
      const auto& h = ball.element(B.element);
      if (group.is_trivial(group.multiply(g, h))) ++report.paired_terms;
      KmsReport r;
      r.lhs = omega_of_product(B.value, A.flowed, mu);
      r.rhs = omega_of_product(A.value, B.value, mu);
      r.equal = r.lhs == r.rhs;
      if (!r.equal) {
        ++report.unequal_pairs;
        if (!report.first_unequal) report.first_unequal = KmsWitness{g, cyl[A.cylinder], h, cyl[B.cylinder], r};
      }
    }
  }
  return report;
}

NonvanishingReport nonvanishing_certificate(const Ball& ball) {
  const auto& G = ball.group();
  NonvanishingReport report;
  for (const auto& g : ball.elements()) {
    if (g.empty()) continue;
    const auto fp = fixed_points(G, g);
    NonvanishingRecord rec;
    rec.g = g;
    rec.translation_length = fp.translation_length;
    rec.at_attracting = busemann_boundary(G, g, fp.attracting);
    rec.at_repelling = busemann_boundary(G, g, fp.repelling);
    rec.passed = rec.translation_length > 0 && rec.at_attracting == rec.translation_length &&
                 rec.at_repelling == -rec.translation_length;
    if (!rec.passed) ++report.failures;
    report.records.push_back(std::move(rec));
  }
  report.note =
      "b(g) is nonzero at both fixed points of every checked g; this supports uniqueness of the KMS state but does "
      "not prove it";
  return report;
}

std::vector<TermRecord> serialize(const CrossedElement& a) {
  const auto& G = a.group();
  std::vector<TermRecord> out;
  for (const auto& [gw, f] : a.terms()) {
    const auto coarse = f.coarsen();
    TermRecord rec;
    rec.word = G.alphabet().format(gw);
    for (std::size_t i = 0; i < coarse.values().size(); ++i) {
      if (coarse.values()[i] == Rational(0)) continue;
      rec.values.emplace_back(G.alphabet().format(cylinder_word(G, coarse.depth(), i)), coarse.values()[i]);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

template class BasicStepFunction<Rational>;
template class BasicStepFunction<std::complex<double>>;
template class BasicCrossedElement<Rational>;
template class BasicCrossedElement<std::complex<double>>;
template CrossedElement cp_multiply(const CrossedElement&, const CrossedElement&);
template ComplexCrossedElement cp_multiply(const ComplexCrossedElement&, const ComplexCrossedElement&);
template CrossedElement cp_adjoint(const CrossedElement&);
template ComplexCrossedElement cp_adjoint(const ComplexCrossedElement&);
template Rational integrate(const StepFunction&, const BoundaryMeasure&);
template std::complex<double> integrate(const ComplexStepFunction&, const BoundaryMeasure&);
template Rational state_omega(const CrossedElement&, const BoundaryMeasure&);
template std::complex<double> state_omega(const ComplexCrossedElement&, const BoundaryMeasure&);

}  // namespace hyperlab
