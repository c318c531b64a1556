#include "polyham/jet.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace polyham {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void enumerate(std::size_t nvars, int degree, std::size_t pos, std::vector<std::uint8_t>& cur,
               std::vector<std::uint8_t>& out) {
  if (pos + 1 == nvars) {
    cur[pos] = static_cast<std::uint8_t>(degree);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[pos] = static_cast<std::uint8_t>(e);
    enumerate(nvars, degree - e, pos + 1, cur, out);
  }
}

}  // namespace

JetSpace::JetSpace(std::size_t nvars, int max_order) : nvars_(nvars), max_order_(max_order) {
  if (max_order < 0) throw std::invalid_argument("negative jet order");
  std::vector<std::uint8_t> cur(nvars, 0);
  prefix_.assign(static_cast<std::size_t>(max_order) + 1, 0);
  for (int d = 0; d <= max_order; ++d) {
    if (nvars == 0) {
      if (d == 0) degree_.push_back(0);
    } else {
      std::vector<std::uint8_t> block;
      enumerate(nvars, d, 0, cur, block);
      exps_.insert(exps_.end(), block.begin(), block.end());
      degree_.insert(degree_.end(), block.size() / nvars, d);
    }
    prefix_[static_cast<std::size_t>(d)] = degree_.size();
  }

  factorial_.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double f = 1.0;
    for (auto e : exponents(i))
      for (int k = 2; k <= e; ++k) f *= k;
    factorial_[i] = f;
  }

  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = 0; b < size(); ++b) {
      if (degree_[a] + degree_[b] > max_order) continue;
      std::vector<int> sum(nvars);
      double w = 1.0;
      auto ea = exponents(a);
      auto eb = exponents(b);
      for (std::size_t v = 0; v < nvars; ++v) {
        sum[v] = ea[v] + eb[v];
        w *= binomial(sum[v], ea[v]);
      }
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(index_of(sum)), w});
    }
  }
  std::stable_sort(products_.begin(), products_.end(), [this](const Product& x, const Product& y) {
    return degree_[x.out] < degree_[y.out];
  });
  product_prefix_.assign(static_cast<std::size_t>(max_order) + 1, 0);
  for (int d = 0; d <= max_order; ++d) {
    product_prefix_[static_cast<std::size_t>(d)] = static_cast<std::size_t>(
        std::count_if(products_.begin(), products_.end(),
                      [&](const Product& p) { return degree_[p.out] <= d; }));
  }

  shift_.assign(nvars * size(), static_cast<std::uint32_t>(size()));
  for (std::size_t v = 0; v < nvars; ++v) {
    for (std::size_t b = 0; b < size(); ++b) {
      if (degree_[b] == max_order) continue;
      std::vector<int> e(exponents(b).begin(), exponents(b).end());
      ++e[v];
      shift_[v * size() + b] = static_cast<std::uint32_t>(index_of(e));
    }
  }
}

const JetSpace& JetSpace::get(std::size_t nvars, int max_order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{nvars, max_order}];
  if (!slot) slot.reset(new JetSpace(nvars, max_order));
  return *slot;
}

std::size_t JetSpace::index_of(std::span<const int> exps) const {
  if (exps.size() != nvars_) return size();
  int deg = 0;
  for (int e : exps) {
    if (e < 0) return size();
    deg += e;
  }
  if (deg > max_order_) return size();
  std::size_t begin = deg == 0 ? 0 : prefix_[static_cast<std::size_t>(deg - 1)];
  for (std::size_t i = begin; i < prefix_[static_cast<std::size_t>(deg)]; ++i) {
    auto e = exponents(i);
    if (std::equal(e.begin(), e.end(), exps.begin(), [](std::uint8_t a, int b) { return a == b; }))
      return i;
  }
  return size();
}

Jet::Jet(const JetSpace& space, int order) : space_(&space), order_(order) {
  if (order < 0 || order > space.max_order()) throw std::invalid_argument("jet order out of range");
  d_.assign(space.count_upto(order), 0.0);
}

Jet Jet::constant(const JetSpace& space, double value, int order) {
  Jet j(space, order);
  j.d_[0] = value;
  return j;
}

Jet Jet::variable(const JetSpace& space, std::size_t var, double value, int order) {
  Jet j(space, order);
  j.d_[0] = value;
  if (order >= 1) j.d_[space.variable_index(var)] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> exps) const {
  std::size_t idx = space_->index_of(exps);
  if (idx >= d_.size()) throw std::out_of_range("partial beyond jet order");
  return d_[idx];
}

Jet Jet::derivative(std::size_t var) const {
  if (order_ < 1) throw std::logic_error("derivative of an order-0 jet");
  if (var >= space_->nvars()) throw std::out_of_range("derivative variable");
  Jet r(*space_, order_ - 1);
  auto src = space_->shift(var);
  for (std::size_t b = 0; b < r.d_.size(); ++b) r.d_[b] = d_[src[b]];
  return r;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(*space_, order);
  std::copy_n(d_.begin(), r.d_.size(), r.d_.begin());
  return r;
}

void Jet::require_same_space(const Jet& o) const {
  if (space_ != o.space_) throw std::logic_error("jets from different spaces");
}

Jet& Jet::operator+=(const Jet& o) {
  require_same_space(o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  require_same_space(o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.require_same_space(b);
  Jet r(*a.space_, std::min(a.order_, b.order_));
  for (const auto& p : a.space_->products(r.order_))
    r.d_[p.out] += p.weight * a.d_[p.lhs] * b.d_[p.rhs];
  return r;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet& Jet::operator*=(double s) {
  for (auto& v : d_) v *= s;
  return *this;
}

Jet compose(const Jet& u, std::span<const double> fderivs) {
  const int r = u.order_;
  if (fderivs.size() < static_cast<std::size_t>(r) + 1)
    throw std::invalid_argument("compose: not enough derivatives");
  Jet w = u;
  w.d_[0] = 0.0;
  double fact = 1.0;
  for (int k = 2; k <= r; ++k) fact *= k;
  Jet res = Jet::constant(*u.space_, fderivs[static_cast<std::size_t>(r)] / fact, r);
  for (int k = r - 1; k >= 0; --k) {
    fact /= (k + 1);
    res = res * w;
    res.d_[0] += fderivs[static_cast<std::size_t>(k)] / fact;
  }
  return res;
}

bool Jet::is_zero() const {
  return std::all_of(d_.begin(), d_.end(), [](double v) { return v == 0.0; });
}

}  // namespace polyham
