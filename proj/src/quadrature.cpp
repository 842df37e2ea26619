#include "finsler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "finsler/error.hpp"

namespace finsler {

namespace {

constexpr double kPolarMargin = 1e-3;
constexpr int kMinNodes = 8;

// Neumaier compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::vector<int> decode(std::size_t flat, const std::vector<int>& counts) {
  std::vector<int> idx(counts.size());
  for (std::size_t a = counts.size(); a-- > 0;) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(counts[a]));
    flat /= static_cast<std::size_t>(counts[a]);
  }
  return idx;
}

std::size_t product(const std::vector<int>& counts) {
  std::size_t p = 1;
  for (int c : counts) p *= static_cast<std::size_t>(c);
  return p;
}

}  // namespace

GridSpec GridSpec::defaults(int n) {
  if (n == 2) return {{32, 32}, {64}};
  if (n == 3) return {{16, 16, 16}, {32, 16}};
  throw Error(ErrorKind::DimensionUnsupported, "no default grid for dimension " + std::to_string(n));
}

GridSpec GridSpec::doubled() const {
  GridSpec g = *this;
  for (auto& c : g.base) c *= 2;
  for (auto& c : g.fiber) c *= 2;
  return g;
}

std::string GridSpec::to_string() const {
  std::ostringstream os;
  for (std::size_t a = 0; a < base.size(); ++a) os << (a ? "x" : "") << base[a];
  os << "/";
  for (std::size_t a = 0; a < fiber.size(); ++a) os << (a ? "x" : "") << fiber[a];
  return os.str();
}

AxisRule periodic_rule(double lo, double hi, int count) {
  AxisRule r;
  r.periodic = true;
  const double h = (hi - lo) / count;
  for (int k = 0; k < count; ++k) {
    r.nodes.push_back(lo + k * h);
    r.weights.push_back(h);
  }
  return r;
}

AxisRule gauss_legendre_rule(double lo, double hi, int count) {
  int m = count;
  for (int cand : {8, 4}) {
    if (count % cand == 0) {
      m = cand;
      break;
    }
  }
  // Nodes and weights on [-1, 1] by Newton iteration on P_m.
  std::vector<double> t(static_cast<std::size_t>(m)), w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    t[i] = -z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  AxisRule r;
  const int panels = count / m;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (int i = 0; i < m; ++i) {
      r.nodes.push_back(a + 0.5 * h * (t[i] + 1.0));
      r.weights.push_back(0.5 * h * w[i]);
    }
  }
  return r;
}

std::vector<double> fiber_direction(int n, std::span<const double> theta) {
  if (n == 2) return {std::cos(theta[0]), std::sin(theta[0])};
  if (n == 3) {
    const double s = std::sin(theta[1]);
    return {s * std::cos(theta[0]), s * std::sin(theta[0]), std::cos(theta[1])};
  }
  throw Error(ErrorKind::DimensionUnsupported, "fiber parameterization exists for n = 2, 3 only");
}

QuadratureGrid QuadratureGrid::make(const FinslerStructure& s, const GridSpec& spec) {
  const int n = s.dim();
  if (n != 2 && n != 3) throw Error(ErrorKind::DimensionUnsupported, "quadrature supports n = 2, 3");
  if (static_cast<int>(spec.base.size()) != n || static_cast<int>(spec.fiber.size()) != n - 1) {
    throw Error(ErrorKind::GridError, "grid spec " + spec.to_string() + " does not fit dimension " + std::to_string(n));
  }
  for (int c : spec.base) {
    if (c < kMinNodes) throw Error(ErrorKind::GridError, "fewer than 8 nodes on a base axis");
  }
  for (int c : spec.fiber) {
    if (c < kMinNodes) throw Error(ErrorKind::GridError, "fewer than 8 nodes on a fiber axis");
  }
  QuadratureGrid g;
  g.dim_ = n;
  g.spec_ = spec;
  const auto& chart = s.chart();
  for (int a = 0; a < n; ++a) {
    const auto [lo, hi] = chart.bounds[a];
    if (chart.periodic[a]) {
      g.base_.push_back(periodic_rule(lo, hi, spec.base[a]));
    } else {
      const double m = chart.excluded_margin[a];
      g.base_.push_back(gauss_legendre_rule(lo + m, hi - m, spec.base[a]));
    }
  }
  g.fiber_.push_back(periodic_rule(0.0, 2.0 * std::numbers::pi, spec.fiber[0]));
  if (n == 3) g.fiber_.push_back(gauss_legendre_rule(kPolarMargin, std::numbers::pi - kPolarMargin, spec.fiber[1]));
  return g;
}

std::size_t QuadratureGrid::base_size() const { return product(spec_.base); }
std::size_t QuadratureGrid::fiber_size() const { return product(spec_.fiber); }

std::vector<double> QuadratureGrid::base_point(std::size_t b, double* weight) const {
  const auto idx = decode(b, spec_.base);
  std::vector<double> x(idx.size());
  double w = 1.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    x[a] = base_[a].nodes[idx[a]];
    w *= base_[a].weights[idx[a]];
  }
  if (weight) *weight = w;
  return x;
}

std::vector<double> QuadratureGrid::fiber_angles(std::size_t f, double* weight) const {
  const auto idx = decode(f, spec_.fiber);
  std::vector<double> t(idx.size());
  double w = 1.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    t[a] = fiber_[a].nodes[idx[a]];
    w *= fiber_[a].weights[idx[a]];
  }
  if (weight) *weight = w;
  return t;
}

VolumeDensity volume_density(const FinslerStructure& s, std::span<const double> x, std::span<const double> theta,
                             bool reversed) {
  const int n = s.dim();
  if (n != 2 && n != 3) throw Error(ErrorKind::DimensionUnsupported, "volume density supports n = 2, 3");
  if (static_cast<int>(theta.size()) != n - 1) throw Error(ErrorKind::DomainError, "fiber angle count");
  if (n == 3 && std::abs(std::sin(theta[1])) < 1e-12) {
    throw Error(ErrorKind::PoleSingularity, "fiber parameterization degenerates at the pole");
  }
  s.check_in_chart(x);
  const int m = n - 1;
  const int coords = n + m;
  const auto& sp = JetSpace::get(coords + n, 2);
  std::vector<Jet> xs, th;
  for (int i = 0; i < n; ++i) xs.push_back(Jet::variable(sp, 2, i, x[i]));
  for (int j = 0; j < m; ++j) th.push_back(Jet::variable(sp, 2, n + j, theta[j]));
  if (reversed) th[0] = 2.0 * theta[0] - th[0];
  std::vector<Jet> u;
  if (n == 2) {
    u = {cos(th[0]), sin(th[0])};
  } else {
    const Jet st = sin(th[1]);
    u = {st * cos(th[0]), st * sin(th[0]), cos(th[1])};
  }
  const Jet fu = sqrt(s.norm_squared(xs, u));
  const Jet inv = reciprocal(fu);
  std::vector<Jet> y;
  for (int i = 0; i < n; ++i) y.push_back(u[i] * inv + Jet::variable(sp, 2, coords + i, 0.0));
  const Jet F = sqrt(s.norm_squared(xs, y));
  // dw(a, b) = d_a w_b - d_b w_a with w = (l_1..l_n, 0..0).
  std::vector<double> w(static_cast<std::size_t>(coords), 0.0);
  std::vector<double> dw(static_cast<std::size_t>(coords * coords), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(coords * coords), 0.0);  // grad(a, b) = d_a w_b
  for (int b = 0; b < n; ++b) {
    const Jet l = F.derivative(coords + b);
    w[b] = l.value();
    for (int a = 0; a < coords; ++a) grad[a * coords + b] = l.derivative(a).value();
  }
  for (int a = 0; a < coords; ++a) {
    for (int b = 0; b < coords; ++b) dw[a * coords + b] = grad[a * coords + b] - grad[b * coords + a];
  }
  std::vector<int> perm(static_cast<std::size_t>(coords));
  for (int a = 0; a < coords; ++a) perm[a] = a;
  double top = 0.0;
  do {
    int inversions = 0;
    for (int a = 0; a < coords; ++a) {
      for (int b = a + 1; b < coords; ++b) inversions += perm[a] > perm[b];
    }
    double term = w[perm[0]];
    for (int k = 0; k < m; ++k) term *= dw[perm[2 * k + 1] * coords + perm[2 * k + 2]];
    top += inversions % 2 ? -term : term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  double factorial = 1.0;
  for (int k = 2; k <= m; ++k) factorial *= k;
  const double sign = (n * (n - 1) / 2) % 2 ? -1.0 : 1.0;
  const double raw = sign / factorial * top / std::pow(2.0, m);
  return {std::abs(raw), raw};
}

int worker_count() {
  if (const char* env = std::getenv("FINSLER_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> integrate_many(const FinslerStructure& s, const QuadratureGrid& grid, int expansion_order,
                                   int count, const NodeIntegrand& integrand) {
  const int n = grid.dim();
  if (n != s.dim()) throw Error(ErrorKind::GridError, "grid dimension does not match structure");
  // Split base axes into those F depends on (outer, one tower each) and invariant ones (rebased).
  std::vector<int> dep_counts, inv_counts, dep_axes, inv_axes;
  for (int a = 0; a < n; ++a) {
    if (s.invariant_along(a)) {
      inv_axes.push_back(a);
      inv_counts.push_back(grid.spec().base[a]);
    } else {
      dep_axes.push_back(a);
      dep_counts.push_back(grid.spec().base[a]);
    }
  }
  const std::size_t n_dep = product(dep_counts);
  const std::size_t n_inv = product(inv_counts);
  const std::size_t n_fib = grid.fiber_size();
  const std::size_t keys = n_dep * n_fib;
  std::vector<std::vector<double>> partial(keys);

  auto run_key = [&](std::size_t key) {
    const std::size_t d = key / n_fib;
    const std::size_t f = key % n_fib;
    double wf = 0.0;
    const auto theta = grid.fiber_angles(f, &wf);
    const auto di = decode(d, dep_counts);
    std::vector<double> x(static_cast<std::size_t>(n));
    double wd = 1.0;
    for (std::size_t k = 0; k < dep_axes.size(); ++k) {
      const auto& ax = grid.base_axes()[dep_axes[k]];
      x[dep_axes[k]] = ax.nodes[di[k]];
      wd *= ax.weights[di[k]];
    }
    for (int a : inv_axes) x[a] = grid.base_axes()[a].nodes[0];
    const auto u = fiber_direction(n, theta);
    const double fu = s.norm(x, u);
    TangentPoint z{x, u};
    for (auto& v : z.y) v /= fu;
    const double rho = volume_density(s, x, theta).value;
    const LocalExpansion e0(s, z, expansion_order);
    std::vector<Accumulator> acc(static_cast<std::size_t>(count));
    std::vector<double> out(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < n_inv; ++i) {
      const auto ii = decode(i, inv_counts);
      double wi = 1.0;
      for (std::size_t k = 0; k < inv_axes.size(); ++k) {
        const auto& ax = grid.base_axes()[inv_axes[k]];
        z.x[inv_axes[k]] = ax.nodes[ii[k]];
        wi *= ax.weights[ii[k]];
      }
      std::fill(out.begin(), out.end(), 0.0);
      if (i == 0) {
        integrand(e0, out);
      } else {
        integrand(e0.rebased(z), out);
      }
      const double w = wf * wd * wi * rho;
      for (int c = 0; c < count; ++c) acc[c].add(w * out[c]);
    }
    partial[key].resize(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) partial[key][c] = acc[c].value();
  };

  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(worker_count()), keys));
  if (workers <= 1) {
    for (std::size_t k = 0; k < keys; ++k) run_key(k);
  } else {
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = static_cast<std::size_t>(t); k < keys; k += static_cast<std::size_t>(workers)) run_key(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<Accumulator> total(static_cast<std::size_t>(count));
  for (const auto& p : partial) {
    for (int c = 0; c < count; ++c) total[c].add(p[c]);
  }
  std::vector<double> result(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) result[c] = total[c].value();
  return result;
}

double integrate_scalar(const FinslerStructure& s, const std::function<double(const TangentPoint&)>& f,
                        const QuadratureGrid& grid) {
  return integrate_many(s, grid, 2, 1, [&](const LocalExpansion& e, std::span<double> out) {
    out[0] = f(e.point());
  })[0];
}

namespace {

int order_for(std::initializer_list<int> depths) { return std::max(2, std::max(depths)); }

}  // namespace

double global_inner_product(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& psi,
                            const QuadratureGrid& grid) {
  if (phi.degree != psi.degree) throw Error(ErrorKind::DegreeMismatch, "inner product of forms of different degree");
  return integrate_many(s, grid, order_for({phi.geometry_depth(), psi.geometry_depth()}), 1,
                        [&](const LocalExpansion& e, std::span<double> out) {
                          out[0] = forms::inner(e, phi.evaluate(e, 0), psi.evaluate(e, 0), 0).value();
                        })[0];
}

std::vector<DivergenceCheck> divergence_integral_checks(const FinslerStructure& s,
                                                       const std::vector<HorizontalForm>& pis,
                                                       const QuadratureGrid& grid) {
  int K = 2;
  for (const auto& pi : pis) {
    if (pi.degree != 1) throw Error(ErrorKind::DegreeMismatch, "divergence check expects a 1-form");
    K = std::max(K, horizontal_codifferential(s, pi).geometry_depth());
  }
  const std::size_t count = pis.size();
  const auto r = integrate_many(s, grid, K, static_cast<int>(2 * count),
                                [&](const LocalExpansion& e, std::span<double> out) {
                                  for (std::size_t k = 0; k < count; ++k) {
                                    const TensorJet P = pis[k].evaluate(e, 1);
                                    out[2 * k] = forms::codifferential(e, P, e.hcov(P))[0].value();
                                    out[2 * k + 1] = forms::norm_squared(e, P, 0).value();
                                  }
                                });
  std::string warning;
  for (int a = 0; a < s.dim(); ++a) {
    if (!s.chart().periodic[a]) {
      warning = "chart axis " + std::to_string(a) + " is not periodic; boundary flux is not accounted for";
      break;
    }
  }
  std::vector<DivergenceCheck> out;
  for (std::size_t k = 0; k < count; ++k) {
    DivergenceCheck c{r[2 * k], std::sqrt(std::max(r[2 * k + 1], 0.0)), 0.0, warning};
    c.defect = std::abs(c.integral) / (1.0 + c.norm);
    out.push_back(std::move(c));
  }
  return out;
}

DivergenceCheck divergence_integral_check(const FinslerStructure& s, const HorizontalForm& pi,
                                          const QuadratureGrid& grid) {
  return divergence_integral_checks(s, {pi}, grid)[0];
}

std::vector<Adjointness> adjointness_defects(const FinslerStructure& s,
                                             const std::vector<std::pair<HorizontalForm, HorizontalForm>>& pairs,
                                             const QuadratureGrid& grid) {
  int K = 2;
  for (const auto& [phi, psi] : pairs) {
    if (psi.degree != phi.degree + 1) throw Error(ErrorKind::DegreeMismatch, "adjointness needs degrees p and p+1");
    K = std::max({K, horizontal_differential(s, phi).geometry_depth(),
                  horizontal_codifferential(s, psi).geometry_depth()});
  }
  const int count = static_cast<int>(pairs.size());
  const auto r = integrate_many(s, grid, K, 2 * count, [&](const LocalExpansion& e, std::span<double> out) {
    for (int k = 0; k < count; ++k) {
      const auto& [phi, psi] = pairs[k];
      const TensorJet P = phi.evaluate(e, 1);
      const TensorJet S = psi.evaluate(e, 1);
      const TensorJet dP = forms::differential(e.hcov(P), phi.degree);
      const TensorJet dS = forms::codifferential(e, S, e.hcov(S));
      out[2 * k] = forms::inner(e, dP, S, 0).value();
      out[2 * k + 1] = forms::inner(e, P, dS, 0).value();
    }
  });
  std::vector<Adjointness> res;
  for (int k = 0; k < count; ++k) {
    const double l = r[2 * k], rr = r[2 * k + 1];
    res.push_back({l, rr, std::abs(l - rr) / (1.0 + std::abs(l))});
  }
  return res;
}

Adjointness adjointness_defect(const FinslerStructure& s, const HorizontalForm& phi, const HorizontalForm& psi,
                               const QuadratureGrid& grid) {
  return adjointness_defects(s, {{phi, psi}}, grid)[0];
}

Bochner bochner_integral(const FinslerStructure& s, const VectorField& X, const QuadratureGrid& grid) {
  const auto r = integrate_many(s, grid, 4, 3, [&](const LocalExpansion& e, std::span<double> out) {
    const auto t = forms::energy_terms(e, X);
    out[0] = t.K;
    out[1] = t.grad_norm2;
    out[2] = t.dZ_minus_dY;
  });
  return {r[0], r[1], r[0] + r[1], r[2]};
}

HarmonicReport is_h_harmonic(const FinslerStructure& s, const HorizontalForm& phi, const QuadratureGrid& grid,
                             double tol) {
  const int p = phi.degree;
  const HorizontalForm lap = horizontal_laplacian(s, phi);
  std::vector<HorizontalForm> parts;
  const bool has_d = p < phi.dim;
  const bool has_delta = p > 0;
  if (has_d) parts.push_back(horizontal_differential(s, phi));
  if (has_delta) parts.push_back(horizontal_codifferential(s, phi));
  int K = std::max(2, lap.geometry_depth());
  for (const auto& f : parts) K = std::max(K, f.geometry_depth());
  const auto r = integrate_many(s, grid, K, 5, [&](const LocalExpansion& e, std::span<double> out) {
    const TensorJet L = lap.evaluate(e, 0);
    const TensorJet P = phi.evaluate(e, 0);
    out[0] = forms::norm_squared(e, L, 0).value();
    out[3] = forms::inner(e, L, P, 0).value();
    out[4] = forms::norm_squared(e, P, 0).value();
    std::size_t k = 0;
    if (has_d) out[1] = forms::norm_squared(e, parts[k++].evaluate(e, 0), 0).value();
    if (has_delta) out[2] = forms::norm_squared(e, parts[k].evaluate(e, 0), 0).value();
  });
  auto root = [](double v) { return std::sqrt(std::max(v, 0.0)); };
  HarmonicReport h{};
  h.laplacian_norm = root(r[0]);
  h.dH_norm = root(r[1]);
  h.deltaH_norm = root(r[2]);
  h.form_norm = root(r[4]);
  h.energy_defect = r[3] - r[1] - r[2];
  h.derived_tol = std::sqrt(std::max(tol, 0.0) * h.form_norm + std::abs(h.energy_defect));
  h.harmonic = h.laplacian_norm <= tol;
  const bool parts_small = h.dH_norm <= h.derived_tol && h.deltaH_norm <= h.derived_tol;
  h.equivalence_holds = h.harmonic == parts_small;
  return h;
}

}  // namespace finsler
