#pragma once

#include <vector>

#include "finsler/structure.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// One mixed partial d^{|a|+|b|} f / dx^a dy^b of a field on TM_0.
struct JetRequest {
  ScalarField target;
  TangentPoint point;
  std::vector<int> x_orders;
  std::vector<int> y_orders;

  int total_order() const;
};

/// Exact-to-roundoff partial via truncated Taylor arithmetic.
/// Throws OrderTooHigh past kMaxJetOrder, DomainError for malformed requests.
double partial(const JetRequest& req);

/// Default central-difference step along one coordinate for a derivative of
/// the given total order.
double default_fd_step(double coordinate, int total_order);

/// Central-difference oracle (fourth-order stencils in every variable).
/// `step <= 0` selects default_fd_step per coordinate.
double fd_partial(const JetRequest& req, double step = 0.0);

}  // namespace finsler
