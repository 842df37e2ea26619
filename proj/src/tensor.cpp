#include "finsler/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace finsler {

std::string variance_string(const Variance& v) {
  std::string s;
  for (Slot slot : v) s += slot == Slot::Upper ? 'u' : 'l';
  return s;
}

IndexLayout::IndexLayout(int dim, int rank) : dim_(dim), rank_(rank), size_(1) {
  for (int r = 0; r < rank; ++r) size_ *= static_cast<std::size_t>(dim);
}

std::vector<int> IndexLayout::unflatten(std::size_t f) const {
  std::vector<int> idx(static_cast<std::size_t>(rank_));
  for (int r = rank_ - 1; r >= 0; --r) {
    idx[static_cast<std::size_t>(r)] = static_cast<int>(f % static_cast<std::size_t>(dim_));
    f /= static_cast<std::size_t>(dim_);
  }
  return idx;
}

TensorJet::TensorJet(int dim, Variance variance)
    : variance_(std::move(variance)),
      layout_(dim, static_cast<int>(variance_.size())),
      data_(layout_.size()) {}

int TensorJet::order() const {
  int o = Jet::kConstantOrder;
  for (const auto& j : data_) o = std::min(o, j.order());
  return o;
}

TensorJet TensorJet::truncated(int order) const {
  TensorJet r = *this;
  for (auto& j : r.data_) j = j.truncated(order);
  return r;
}

double TensorValue::max_abs() const {
  double m = 0.0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

TensorValue TensorValue::from_jets(const TensorJet& t, const TangentPoint& z) {
  TensorValue v;
  v.dim = t.dim();
  v.variance = t.variance();
  v.point = z;
  v.data.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v.data[i] = t[i].value();
  return v;
}

double max_abs_diff(const TensorValue& a, const TensorValue& b) {
  if (a.dim != b.dim || a.data.size() != b.data.size()) {
    throw std::invalid_argument("tensor shapes differ");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace finsler
