#include "polyham/dtensor.hpp"

#include <cmath>
#include <utility>

namespace polyham {

std::string describe(std::span<const IndexSlot> slots) {
  auto one = [](const IndexSlot& slot) {
    std::string s(1, slot.cls == IndexClass::temporal ? 'T' : 'S');
    s += slot.variance == Variance::upper ? '^' : '_';
    return s;
  };
  std::string out;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!out.empty()) out += ',';
    if (slots[k].pair_head && k + 1 < slots.size()) {
      out += '(' + one(slots[k]) + ',' + one(slots[k + 1]) + ')';
      ++k;
    } else {
      out += one(slots[k]);
    }
  }
  return out;
}

void validate_pairs(std::span<const IndexSlot> slots) {
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!slots[k].pair_head) continue;
    if (k + 1 >= slots.size() || slots[k].cls == slots[k + 1].cls ||
        slots[k].variance == slots[k + 1].variance || slots[k + 1].pair_head)
      throw SlotMismatch("a pair needs one spatial and one temporal slot of opposite variances");
  }
}

double max_abs(const DTensor& t) {
  double m = 0.0;
  for (double v : t.components()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const DTensor& a, const DTensor& b) {
  if (a.size() != b.size()) throw SlotMismatch("comparing tensors of different size");
  double m = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) m = std::max(m, std::abs(a[f] - b[f]));
  return m;
}

DTensor values(const JetTensor& t) {
  DTensor out(t.slots(), t.dims());
  for (std::size_t f = 0; f < t.size(); ++f) out[f] = t[f].value();
  return out;
}

JetTensor jet_tensor(const DTensor& t, const JetSpace& space, int order) {
  JetTensor out(t.slots(), t.dims(), Jet::constant(space, 0.0, order));
  for (std::size_t f = 0; f < t.size(); ++f) out[f] = Jet::constant(space, t[f], order);
  return out;
}

namespace {

void check_metric_shape(std::span<const IndexSlot> slots) {
  if (slots.size() != 2 || slots[0].cls != slots[1].cls ||
      slots[0].variance != Variance::lower || slots[1].variance != Variance::lower)
    throw SlotMismatch("metric inversion needs two lower slots of one class");
}

std::vector<double> square(const DTensor& g, std::size_t& dim) {
  dim = g.extent(0);
  return {g.components().begin(), g.components().end()};
}

// LU with partial pivoting; returns determinant, leaves inverse in `inv`.
double gauss_jordan(std::vector<double> a, std::size_t n, std::vector<double>* inv) {
  std::vector<double> b(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i * n + i] = 1.0;
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(b[c * n + k], b[piv * n + k]);
      }
      det = -det;
    }
    const double d = a[c * n + c];
    det *= d;
    for (std::size_t k = 0; k < n; ++k) {
      a[c * n + k] /= d;
      b[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        b[r * n + k] -= f * b[c * n + k];
      }
    }
  }
  if (inv) *inv = std::move(b);
  return det;
}

}  // namespace

double determinant(const DTensor& g) {
  if (g.rank() != 2 || g.extent(0) != g.extent(1)) throw SlotMismatch("determinant of non-square");
  std::size_t n = 0;
  auto a = square(g, n);
  return gauss_jordan(std::move(a), n, nullptr);
}

DTensor invert_metric(const DTensor& g) {
  check_metric_shape(g.slots());
  std::size_t n = 0;
  auto a = square(g, n);
  double scale = 1.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a[i * n + j] - a[j * n + i]) > kSymmetryTolerance * scale)
        throw AsymmetricInput("metric is not symmetric");
  std::vector<double> inv;
  const double det = gauss_jordan(a, n, &inv);
  if (!(std::abs(det) > kSingularDeterminant))
    throw SingularMetric("metric determinant " + std::to_string(det) + " below threshold");
  IndexSlot up = g.slot(0);
  up.variance = Variance::upper;
  DTensor out({up, up}, g.dims());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = 0.5 * (inv[i * n + j] + inv[j * n + i]);
  return out;
}

JetTensor invert_metric(const JetTensor& g) {
  check_metric_shape(g.slots());
  const DTensor g0 = values(g);
  const DTensor inv0 = invert_metric(g0);
  const std::size_t n = g.extent(0);
  const JetSpace& space = g[0].space();
  int order = g[0].order();
  for (const auto& v : g.components()) order = std::min(order, v.order());

  // g = g0 + E with E free of constant terms:
  // g^-1 = sum_k (-g0^-1 E)^k g0^-1, exact through `order` since E^k starts at degree k.
  using Mat = std::vector<Jet>;
  const Jet zero = Jet::constant(space, 0.0, order);
  auto matmul = [&](const Mat& x, const Mat& y) {
    Mat r(n * n, zero);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] += x[i * n + k] * y[k * n + j];
    return r;
  };
  Mat base(n * n, zero);
  for (std::size_t f = 0; f < n * n; ++f) base[f] = Jet::constant(space, inv0[f], order);
  Mat e(n * n, zero);
  for (std::size_t f = 0; f < n * n; ++f) {
    e[f] = g[f].truncated(order);
    e[f] += -g0[f];
  }
  Mat neg_ginv_e = matmul(base, e);
  for (auto& v : neg_ginv_e) v *= -1.0;
  Mat term = base;
  Mat total = base;
  for (int k = 1; k <= order; ++k) {
    term = matmul(neg_ginv_e, term);
    for (std::size_t f = 0; f < n * n; ++f) total[f] += term[f];
  }
  IndexSlot up = g.slot(0);
  up.variance = Variance::upper;
  JetTensor out({up, up}, g.dims(), zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = (total[i * n + j] + total[j * n + i]) * 0.5;
  return out;
}

}  // namespace polyham
