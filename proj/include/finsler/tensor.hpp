#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "finsler/jet.hpp"

namespace finsler {

enum class Slot : std::uint8_t { Upper, Lower };

using Variance = boost::container::small_vector<Slot, 6>;

inline Variance lower(int rank) { return Variance(static_cast<std::size_t>(rank), Slot::Lower); }
inline Variance upper(int rank) { return Variance(static_cast<std::size_t>(rank), Slot::Upper); }

std::string variance_string(const Variance& v);

/// A point z = (x, y) of the slit tangent bundle in chart coordinates.
struct TangentPoint {
  std::vector<double> x;
  std::vector<double> y;

  int dim() const { return static_cast<int>(x.size()); }
};

/// Row-major n^rank array indexing shared by the tensor containers.
class IndexLayout {
 public:
  IndexLayout(int dim, int rank);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return size_; }

  std::size_t flat(std::span<const int> idx) const {
    std::size_t f = 0;
    for (int i : idx) f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return f;
  }
  std::size_t flat(std::initializer_list<int> idx) const {
    return flat(std::span<const int>(idx.begin(), idx.size()));
  }
  /// Inverse of flat().
  std::vector<int> unflatten(std::size_t f) const;

 private:
  int dim_;
  int rank_;
  std::size_t size_;
};

/// Jet-valued tensor components at a point (Taylor expansions in (x, y)).
class TensorJet {
 public:
  TensorJet() : layout_(1, 0), data_(1) {}
  TensorJet(int dim, Variance variance);

  int dim() const { return layout_.dim(); }
  int rank() const { return layout_.rank(); }
  const Variance& variance() const { return variance_; }
  const IndexLayout& layout() const { return layout_; }
  std::size_t size() const { return data_.size(); }
  /// Lowest jet order among the components.
  int order() const;

  Jet& operator[](std::size_t f) { return data_[f]; }
  const Jet& operator[](std::size_t f) const { return data_[f]; }
  template <class... I>
  Jet& operator()(I... i) {
    return data_[layout_.flat({static_cast<int>(i)...})];
  }
  template <class... I>
  const Jet& operator()(I... i) const {
    return data_[layout_.flat({static_cast<int>(i)...})];
  }
  Jet& at(std::span<const int> idx) { return data_[layout_.flat(idx)]; }
  const Jet& at(std::span<const int> idx) const { return data_[layout_.flat(idx)]; }

  TensorJet truncated(int order) const;

 private:
  Variance variance_;
  IndexLayout layout_;
  std::vector<Jet> data_;
};

/// Plain numeric tensor at a point, the public result type of pointwise operations.
struct TensorValue {
  int dim = 0;
  Variance variance;
  std::vector<double> data;
  TangentPoint point;

  int rank() const { return static_cast<int>(variance.size()); }
  IndexLayout layout() const { return IndexLayout(dim, rank()); }

  template <class... I>
  double operator()(I... i) const {
    return data[layout().flat({static_cast<int>(i)...})];
  }
  double max_abs() const;

  static TensorValue from_jets(const TensorJet& t, const TangentPoint& z);
};

/// Max |a - b| over components; dimensions and variance must agree.
double max_abs_diff(const TensorValue& a, const TensorValue& b);

}  // namespace finsler
