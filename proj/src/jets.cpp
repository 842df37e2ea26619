#include "finsler/jets.hpp"

#include <array>
#include <cmath>

#include "finsler/error.hpp"

namespace finsler {

namespace {

void validate(const JetRequest& req) {
  const auto n = req.point.x.size();
  if (n == 0 || req.point.y.size() != n || req.x_orders.size() != n || req.y_orders.size() != n) {
    throw Error(ErrorKind::DomainError, "jet request dimensions inconsistent");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (req.x_orders[i] < 0 || req.y_orders[i] < 0) throw Error(ErrorKind::DomainError, "negative order");
  }
  if (!req.target) throw Error(ErrorKind::DomainError, "jet request without target");
}

// Fourth-order central stencils for the k-th derivative, offsets -3..3.
struct Stencil {
  std::array<double, 7> w;
  double denom;
};

const Stencil& stencil(int k) {
  static const std::array<Stencil, 5> table = {{
      {{0, 0, 0, 1, 0, 0, 0}, 1.0},
      {{0, 1, -8, 0, 8, -1, 0}, 12.0},
      {{0, -1, 16, -30, 16, -1, 0}, 12.0},
      {{1, -8, 13, 0, -13, 8, -1}, 8.0},
      {{-1, 12, -39, 56, -39, 12, -1}, 6.0},
  }};
  if (k > 4) throw Error(ErrorKind::OrderTooHigh, "finite differences support order <= 4 per variable");
  return table[static_cast<std::size_t>(k)];
}

}  // namespace

int JetRequest::total_order() const {
  int t = 0;
  for (int k : x_orders) t += k;
  for (int k : y_orders) t += k;
  return t;
}

double partial(const JetRequest& req) {
  validate(req);
  const int order = req.total_order();
  if (order > kMaxJetOrder) {
    throw Error(ErrorKind::OrderTooHigh, "total order " + std::to_string(order) + " exceeds engine limit " +
                                             std::to_string(kMaxJetOrder));
  }
  const int n = static_cast<int>(req.point.x.size());
  const auto& sp = JetSpace::get(2 * n, order);
  std::vector<Jet> x, y;
  for (int i = 0; i < n; ++i) x.push_back(Jet::variable(sp, order, i, req.point.x[i]));
  for (int i = 0; i < n; ++i) y.push_back(Jet::variable(sp, order, n + i, req.point.y[i]));
  const Jet f = req.target(x, y);
  std::vector<int> multi(req.x_orders);
  multi.insert(multi.end(), req.y_orders.begin(), req.y_orders.end());
  return f.partial(multi);
}

double default_fd_step(double coordinate, int total_order) {
  static constexpr std::array<double, 5> base = {1e-4, 1e-4, 1e-3, 5e-3, 1e-2};
  const int k = total_order < 0 ? 0 : (total_order > 4 ? 4 : total_order);
  return base[static_cast<std::size_t>(k)] * (1.0 + std::abs(coordinate));
}

double fd_partial(const JetRequest& req, double step) {
  validate(req);
  const int n = static_cast<int>(req.point.x.size());
  const int total = req.total_order();
  std::vector<int> orders(req.x_orders);
  orders.insert(orders.end(), req.y_orders.begin(), req.y_orders.end());
  std::vector<double> base(req.point.x);
  base.insert(base.end(), req.point.y.begin(), req.point.y.end());

  std::vector<int> active;
  std::vector<double> h;
  for (int v = 0; v < 2 * n; ++v) {
    if (orders[v] > 0) {
      active.push_back(v);
      h.push_back(step > 0.0 ? step : default_fd_step(base[v], total));
    }
  }
  auto eval = [&](const std::vector<double>& p) {
    std::vector<Jet> x(p.begin(), p.begin() + n);
    std::vector<Jet> y(p.begin() + n, p.end());
    return req.target(x, y).value();
  };
  if (active.empty()) return eval(base);

  // Tensor-product stencil over the active variables.
  const std::size_t m = active.size();
  std::vector<int> off(m, -3);
  double sum = 0.0;
  std::vector<double> p(base);
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < m; ++a) w *= stencil(orders[active[a]]).w[static_cast<std::size_t>(off[a] + 3)];
    if (w != 0.0) {
      for (std::size_t a = 0; a < m; ++a) p[active[a]] = base[active[a]] + off[a] * h[a];
      sum += w * eval(p);
    }
    std::size_t a = 0;
    while (a < m && ++off[a] > 3) off[a++] = -3;
    if (a == m) break;
  }
  for (std::size_t a = 0; a < m; ++a) {
    const int k = orders[active[a]];
    sum /= stencil(k).denom * std::pow(h[a], k);
  }
  return sum;
}

}  // namespace finsler
