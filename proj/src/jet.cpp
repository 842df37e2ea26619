#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "finsler/error.hpp"

namespace finsler {

namespace {

// All exponent vectors of `vars` entries summing to `degree`, lexicographically
// descending in the first variable.
void compositions(int vars, int degree, std::vector<std::uint8_t>& prefix,
                  std::vector<std::vector<std::uint8_t>>& out) {
  if (static_cast<int>(prefix.size()) == vars - 1) {
    prefix.push_back(static_cast<std::uint8_t>(degree));
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = degree; k >= 0; --k) {
    prefix.push_back(static_cast<std::uint8_t>(k));
    compositions(vars, degree - k, prefix, out);
    prefix.pop_back();
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

const JetSpace* common_space(const Jet& a, const Jet& b) {
  if (a.is_constant()) return b.space();
  if (b.is_constant() || a.space() == b.space()) return a.space();
  throw std::logic_error("jets from different spaces combined");
}

}  // namespace

JetSpace::JetSpace(int vars, int max_order) : vars_(vars), max_order_(max_order) {
  if (vars < 1 || max_order < 0 || max_order > kMaxJetOrder) {
    throw Error(ErrorKind::OrderTooHigh, "jet space with " + std::to_string(vars) +
                                             " variables and order " + std::to_string(max_order));
  }
  std::map<std::vector<std::uint8_t>, int> lookup;
  prefix_.push_back(0);
  for (int d = 0; d <= max_order; ++d) {
    std::vector<std::vector<std::uint8_t>> monos;
    std::vector<std::uint8_t> scratch;
    compositions(vars, d, scratch, monos);
    for (auto& m : monos) {
      lookup.emplace(m, static_cast<int>(degree_.size()));
      exps_.insert(exps_.end(), m.begin(), m.end());
      degree_.push_back(d);
    }
    prefix_.push_back(static_cast<int>(degree_.size()));
  }
  const int count = static_cast<int>(degree_.size());
  shift_.assign(static_cast<std::size_t>(count) * vars, -1);
  for (int i = 0; i < count; ++i) {
    if (degree_[i] == max_order) continue;
    auto e = exponents(i);
    std::vector<std::uint8_t> m(e.begin(), e.end());
    for (int v = 0; v < vars; ++v) {
      ++m[v];
      shift_[static_cast<std::size_t>(i) * vars + v] = lookup.at(m);
      --m[v];
    }
  }
  // Product table: (i, j) -> i + j, grouped by output degree.
  std::vector<std::vector<Term>> by_degree(static_cast<std::size_t>(max_order) + 1);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count && degree_[i] + degree_[j] <= max_order; ++j) {
      std::vector<std::uint8_t> m(vars);
      auto ei = exponents(i);
      auto ej = exponents(j);
      for (int v = 0; v < vars; ++v) m[v] = static_cast<std::uint8_t>(ei[v] + ej[v]);
      by_degree[static_cast<std::size_t>(degree_[i] + degree_[j])].push_back({i, j, lookup.at(m)});
    }
  }
  term_prefix_.push_back(0);
  for (auto& group : by_degree) {
    terms_.insert(terms_.end(), group.begin(), group.end());
    term_prefix_.push_back(static_cast<int>(terms_.size()));
  }
}

const JetSpace& JetSpace::get(int vars, int max_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> registry;
  std::lock_guard lock(mutex);
  auto& slot = registry[{vars, max_order}];
  if (!slot) slot = std::make_unique<JetSpace>(vars, max_order);
  return *slot;
}

int JetSpace::index_of(std::span<const int> exps) const {
  int idx = 0;
  for (int v = 0; v < vars_; ++v) {
    for (int k = 0; k < exps[static_cast<std::size_t>(v)]; ++k) {
      idx = shifted(idx, v);
      if (idx < 0) return -1;
    }
  }
  return idx;
}

Jet::Jet(const JetSpace& space, int order, double value) : space_(&space), order_(order) {
  if (order < 0 || order > space.max_order()) {
    throw Error(ErrorKind::OrderTooHigh, "jet order " + std::to_string(order) + " outside space limit " +
                                             std::to_string(space.max_order()));
  }
  c_.assign(static_cast<std::size_t>(space.size(order)), 0.0);
  c_[0] = value;
}

Jet Jet::variable(const JetSpace& space, int order, int var, double value) {
  Jet j(space, order, value);
  if (order >= 1) j.c_[static_cast<std::size_t>(space.shifted(0, var))] = 1.0;
  return j;
}

Jet Jet::truncated(int order) const {
  if (is_constant() || order >= order_) return *this;
  Jet r(0.0);
  r.space_ = space_;
  r.order_ = std::max(order, 0);
  r.c_.assign(c_.begin(), c_.begin() + space_->size(r.order_));
  return r;
}

Jet Jet::derivative(int var) const {
  if (is_constant()) return Jet(0.0);
  if (order_ == 0) throw Error(ErrorKind::DomainError, "differentiating an order-0 jet");
  Jet r(*space_, order_ - 1);
  const int n = space_->size(order_ - 1);
  for (int i = 0; i < n; ++i) {
    const int s = space_->shifted(i, var);
    r.c_[static_cast<std::size_t>(i)] = (space_->exponents(i)[static_cast<std::size_t>(var)] + 1) *
                                         c_[static_cast<std::size_t>(s)];
  }
  return r;
}

double Jet::partial(std::span<const int> multi_index) const {
  int total = 0;
  for (int k : multi_index) total += k;
  if (total == 0) return c_[0];
  if (is_constant()) return 0.0;
  if (total > order_) throw Error(ErrorKind::OrderTooHigh, "partial beyond jet order");
  const int idx = space_->index_of(multi_index);
  double f = c_[static_cast<std::size_t>(idx)];
  for (int k : multi_index) f *= factorial(k);
  return f;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.is_constant()) {
    c_[0] += o.c_[0];
    return *this;
  }
  if (is_constant()) {
    const double v = c_[0];
    *this = o;
    c_[0] += v;
    return *this;
  }
  common_space(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.is_constant()) {
    c_[0] -= o.c_[0];
    return *this;
  }
  if (is_constant()) {
    const double v = c_[0];
    *this = -o;
    c_[0] += v;
    return *this;
  }
  common_space(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::add_product(const Jet& a, const Jet& b, double s) {
  if (a.is_constant() || b.is_constant()) return *this += (a * b) * s;
  common_space(a, b);
  const int order = std::min(a.order_, b.order_);
  if (is_constant()) {
    *this = Jet(*a.space_, order, c_[0]);
  } else {
    common_space(*this, a);
    if (order < order_) {
      order_ = order;
      c_.resize(static_cast<std::size_t>(space_->size(order)));
    }
  }
  double* out = c_.data();
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  if (order_ == 0) {
    out[0] += s * pa[0] * pb[0];
    return *this;
  }
  for (const auto& t : space_->products(order_)) out[t.out] += s * pa[t.lhs] * pb[t.rhs];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.is_constant()) return b * a.c_[0];
  if (b.is_constant()) return a * b.c_[0];
  const JetSpace* sp = common_space(a, b);
  const int order = std::min(a.order_, b.order_);
  Jet r(*sp, order);
  if (order == 0) {
    r.c_[0] = a.c_[0] * b.c_[0];
    return r;
  }
  double* out = r.c_.data();
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  for (const auto& t : sp->products(order)) out[t.out] += pa[t.lhs] * pb[t.rhs];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.is_constant()) return a * (1.0 / b.c_[0]);
  return a * reciprocal(b);
}

Jet compose(const Jet& a, std::span<const double> derivs) {
  if (a.is_constant() || a.order_ == 0) {
    Jet r = a;
    r.c_[0] = derivs[0];
    return r;
  }
  if (a.order_ == 1) {
    Jet r = a * derivs[1];
    r.c_[0] = derivs[0];
    return r;
  }
  // Horner in h = a - a0 with Taylor weights f^(k)/k!.
  Jet h = a;
  h.c_[0] = 0.0;
  const int k = a.order_;
  Jet r(*a.space_, k, derivs[static_cast<std::size_t>(k)] / factorial(k));
  for (int j = k - 1; j >= 0; --j) {
    r = r * h;
    r.c_[0] += derivs[static_cast<std::size_t>(j)] / factorial(j);
  }
  return r;
}

namespace {

using Derivs = boost::container::small_vector<double, kMaxJetOrder + 1>;

std::size_t derivative_count(const Jet& a) {
  return a.is_constant() ? 1u : static_cast<std::size_t>(a.order()) + 1u;
}

}  // namespace

Jet pow(const Jet& a, double exponent) {
  const double v = a.value();
  if (v <= 0.0 && exponent != std::floor(exponent)) {
    throw Error(ErrorKind::DomainError, "non-integer power of non-positive value");
  }
  Derivs d(derivative_count(a));
  double coef = 1.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = coef * std::pow(v, exponent - static_cast<double>(k));
    coef *= exponent - static_cast<double>(k);
  }
  return compose(a, {d.data(), d.size()});
}

Jet reciprocal(const Jet& a) {
  if (a.value() == 0.0) throw Error(ErrorKind::Singular, "reciprocal of zero");
  return pow(a, -1.0);
}

Jet sqrt(const Jet& a) {
  if (a.value() <= 0.0) throw Error(ErrorKind::DomainError, "sqrt of non-positive value");
  return pow(a, 0.5);
}

Jet exp(const Jet& a) {
  Derivs d(derivative_count(a), std::exp(a.value()));
  return compose(a, {d.data(), d.size()});
}

Jet log(const Jet& a) {
  const double v = a.value();
  if (v <= 0.0) throw Error(ErrorKind::DomainError, "log of non-positive value");
  Derivs d(derivative_count(a));
  d[0] = std::log(v);
  double f = 1.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * f / std::pow(v, static_cast<double>(k));
    f *= static_cast<double>(k);
  }
  return compose(a, {d.data(), d.size()});
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  Derivs d(derivative_count(a));
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
  return compose(a, {d.data(), d.size()});
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  Derivs d(derivative_count(a));
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = cycle[k % 4];
  return compose(a, {d.data(), d.size()});
}

}  // namespace finsler
