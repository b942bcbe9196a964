// Copyright 2026 The eggkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "egg/selector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <zlib.h>

#include "egg/error.hpp"
#include "egg/parallel.hpp"

namespace egg {

std::string_view to_string(RadiusMap m) {
  return m == RadiusMap::kExp ? "exp" : "square";
}

RadiusMap parse_radius_map(std::string_view s) {
  if (s == "exp") return RadiusMap::kExp;
  if (s == "square") return RadiusMap::kSquare;
  throw ConfigError("selector.f_plus",
                    "expected \"exp\" or \"square\", got \"" + std::string(s) +
                        "\"");
}

// Offsets into the flat parameter vector.
struct HeadLayout {
  std::size_t w1c, b1c, w2c, b2c, w1r, b1r, w2r, b2r, total;

  explicit HeadLayout(const HeadDims& d) {
    std::size_t o = 0;
    w1c = o; o += d.hidden * d.input;
    b1c = o; o += d.hidden;
    w2c = o; o += d.center * d.hidden;
    b2c = o; o += d.center;
    w1r = o; o += d.hidden * d.input;
    b1r = o; o += d.hidden;
    w2r = o; o += d.hidden;
    b2r = o; o += 1;
    total = o;
  }
};

namespace {

// out = W x + b with W row-major (rows x cols).
void affine(const double* w, const double* b, std::span<const double> x,
            std::size_t rows, double* out) {
  const std::size_t cols = x.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w + i * cols;
    double acc = b[i];
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

struct Pass {
  std::vector<double> center_pre;  // hidden pre-activation, center net
  std::vector<double> radius_pre;  // hidden pre-activation, radius net
  std::vector<double> center;
  double z = 0.0;
  double r = 1.0;
};

double radius_of(RadiusMap map, double z) {
  if (map == RadiusMap::kExp) return std::exp(z);
  return std::max(z * z, kMinSquareRadius);
}

double radius_slope(RadiusMap map, double z, double r) {
  if (map == RadiusMap::kExp) return r;
  return z * z > kMinSquareRadius ? 2.0 * z : 0.0;
}

Pass forward(const SphereHead& head, std::span<const double> v) {
  const HeadDims& d = head.dims();
  if (v.size() != d.input) throw DimensionMismatch(d.input, v.size());
  const HeadLayout L(d);
  const double* p = head.params().data();
  Pass out;
  out.center_pre.resize(d.hidden);
  out.radius_pre.resize(d.hidden);
  out.center.resize(d.center);
  std::vector<double> act(d.hidden);

  affine(p + L.w1c, p + L.b1c, v, d.hidden, out.center_pre.data());
  for (std::size_t i = 0; i < d.hidden; ++i) {
    act[i] = std::max(out.center_pre[i], 0.0);
  }
  affine(p + L.w2c, p + L.b2c, act, d.center, out.center.data());

  affine(p + L.w1r, p + L.b1r, v, d.hidden, out.radius_pre.data());
  double z = p[L.b2r];
  for (std::size_t i = 0; i < d.hidden; ++i) {
    z += p[L.w2r + i] * std::max(out.radius_pre[i], 0.0);
  }
  out.z = z;
  out.r = radius_of(head.radius_map(), z);
  return out;
}

// Accumulates parameter gradients for one input given dL/dcenter, dL/dr.
void backward(const SphereHead& head, std::span<const double> v,
              const Pass& pass, std::span<const double> d_center,
              double d_radius, std::vector<double>& grad) {
  const HeadDims& d = head.dims();
  const HeadLayout L(d);
  const double* p = head.params().data();
  double* g = grad.data();

  // Center network.
  for (std::size_t i = 0; i < d.center; ++i) g[L.b2c + i] += d_center[i];
  for (std::size_t k = 0; k < d.hidden; ++k) {
    const double pre = pass.center_pre[k];
    const double a = std::max(pre, 0.0);
    double g_act = 0.0;
    for (std::size_t i = 0; i < d.center; ++i) {
      g[L.w2c + i * d.hidden + k] += d_center[i] * a;
      g_act += d_center[i] * p[L.w2c + i * d.hidden + k];
    }
    if (pre <= 0.0 || g_act == 0.0) continue;
    g[L.b1c + k] += g_act;
    double* row = g + L.w1c + k * d.input;
    for (std::size_t j = 0; j < d.input; ++j) row[j] += g_act * v[j];
  }

  // Radius network.
  const double dz = d_radius * radius_slope(head.radius_map(), pass.z, pass.r);
  if (dz == 0.0) return;
  g[L.b2r] += dz;
  for (std::size_t k = 0; k < d.hidden; ++k) {
    const double pre = pass.radius_pre[k];
    if (pre <= 0.0) continue;
    g[L.w2r + k] += dz * pre;
    const double g_pre = dz * p[L.w2r + k];
    g[L.b1r + k] += g_pre;
    double* row = g + L.w1r + k * d.input;
    for (std::size_t j = 0; j < d.input; ++j) row[j] += g_pre * v[j];
  }
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

// log(1 + e^x) without overflow.
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double selector_logit(double r_p, double r_q, double d) {
  return 2.0 * (r_q - d) / r_p;
}

}  // namespace

SphereHead::SphereHead(HeadDims dims, RadiusMap map)
    : dims_(dims), map_(map), params_(param_count(dims), 0.0) {
  if (dims.input == 0 || dims.hidden == 0 || dims.center == 0) {
    throw ConfigError("selector.dims", "all head dimensions must be positive");
  }
}

std::size_t SphereHead::param_count(const HeadDims& d) {
  return HeadLayout(d).total;
}

SphereHead SphereHead::initialized(HeadDims dims, RadiusMap map,
                                   std::uint64_t seed) {
  SphereHead h(dims, map);
  const HeadLayout L(dims);
  SplitMix64 rng(seed);
  auto fill = [&](std::size_t from, std::size_t count, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) {
      h.params_[from + i] = bound * (2.0 * rng.uniform() - 1.0);
    }
  };
  fill(L.w1c, dims.hidden * dims.input, dims.input);
  fill(L.b1c, dims.hidden, dims.input);
  fill(L.w2c, dims.center * dims.hidden, dims.hidden);
  fill(L.b2c, dims.center, dims.hidden);
  fill(L.w1r, dims.hidden * dims.input, dims.input);
  fill(L.b1r, dims.hidden, dims.input);
  fill(L.w2r, dims.hidden, dims.hidden);
  fill(L.b2r, 1, dims.hidden);
  return h;
}

PredicateSphere SphereHead::sphere(std::span<const double> v) const {
  Pass p = forward(*this, v);
  return {std::move(p.center), p.r};
}

double SphereHead::radius_logit(std::span<const double> v) const {
  return forward(*this, v).z;
}

double SphereHead::radius_from_logit(double z) const {
  return radius_of(map_, z);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double overlap_prob(double r_p, double r_q, double d) {
  // Branches and value are written in terms of (r_q - d) so the result is
  // monotone in it under rounding. Same value as (r_p + r_q - d) / (2 r_p).
  const double gap = r_q - d;
  if (gap <= -r_p) return 0.0;
  if (gap >= r_p) return 1.0;
  return 0.5 + gap / (2.0 * r_p);
}

double center_distance(const PredicateSphere& p, const PredicateSphere& q) {
  if (p.center.size() != q.center.size()) {
    throw DimensionMismatch(p.center.size(), q.center.size());
  }
  return distance(p.center, q.center);
}

double overlap_prob(const PredicateSphere& p, const PredicateSphere& q) {
  return overlap_prob(p.radius, q.radius, center_distance(p, q));
}

double selector_score(double r_p, double r_q, double d) {
  return sigmoid(selector_logit(r_p, r_q, d));
}

double selector_score(const PredicateSphere& p, const PredicateSphere& q) {
  return selector_score(p.radius, q.radius, center_distance(p, q));
}

double batch_loss(const SphereHead& head, std::span<const TrainExample> batch) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : batch) {
    const auto sp = head.sphere(ex.premise);
    const auto sq = head.sphere(ex.hypothesis);
    const double x =
        selector_logit(sp.radius, sq.radius, center_distance(sp, sq));
    total += softplus(x) - ex.target * x;
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> head_gradient(const SphereHead& head,
                                  std::span<const TrainExample> batch) {
  std::vector<double> grad(head.params().size(), 0.0);
  if (batch.empty()) return grad;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::size_t dc = head.dims().center;
  std::vector<double> g_cp(dc), g_cq(dc);
  for (const auto& ex : batch) {
    const Pass pp = forward(head, ex.premise);
    const Pass pq = forward(head, ex.hypothesis);
    const double d = distance(pp.center, pq.center);
    const double x = selector_logit(pp.r, pq.r, d);
    const double g = (sigmoid(x) - ex.target) * scale;

    const double g_rq = g * 2.0 / pp.r;
    const double g_d = -g * 2.0 / pp.r;
    const double g_rp = -g * x / pp.r;
    for (std::size_t i = 0; i < dc; ++i) {
      const double u = d > 0.0 ? (pp.center[i] - pq.center[i]) / d : 0.0;
      g_cp[i] = g_d * u;
      g_cq[i] = -g_d * u;
    }
    backward(head, ex.premise, pp, g_cp, g_rp, grad);
    backward(head, ex.hypothesis, pq, g_cq, g_rq, grad);
  }
  return grad;
}

void SelectorTrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) {
    throw ConfigError("selector.learning_rate", "must be non-negative");
  }
  if (!(weight_decay >= 0.0)) {
    throw ConfigError("selector.weight_decay", "must be non-negative");
  }
  if (positive_repeat < 1) {
    throw ConfigError("selector.positive_repeat", "must be at least 1");
  }
  if (patience < 1) throw ConfigError("selector.patience", "must be at least 1");
  if (max_epochs < 0) {
    throw ConfigError("selector.max_epochs", "must be non-negative");
  }
  if (batch_size < 1) {
    throw ConfigError("selector.batch_size", "must be positive");
  }
}

double selector_f1(const SphereHead& head, std::span<const TrainExample> data) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& ex : data) {
    const bool pred =
        selector_score(head.sphere(ex.premise), head.sphere(ex.hypothesis)) >
        0.5;
    const bool gold = ex.target > 0.5;
    tp += pred && gold;
    fp += pred && !gold;
    fn += !pred && gold;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

TrainResult train_head(const SphereHead& init,
                       std::span<const TrainExample> train,
                       std::span<const TrainExample> valid,
                       const SelectorTrainConfig& cfg) {
  cfg.validate();
  const bool has_pos = std::any_of(train.begin(), train.end(),
                                   [](const auto& e) { return e.target > 0.5; });
  const bool has_neg = std::any_of(train.begin(), train.end(),
                                   [](const auto& e) { return e.target <= 0.5; });
  if (!has_pos || !has_neg) {
    throw DegenerateData("selector training needs positive and negative pairs");
  }
  if (valid.empty()) valid = train;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const int reps = train[i].target > 0.5 ? cfg.positive_repeat : 1;
    for (int r = 0; r < reps; ++r) order.push_back(i);
  }

  TrainResult result{init, 0, {}};
  SphereHead head = init;
  double best_f1 = selector_f1(head, valid);
  double best_loss = batch_loss(head, valid);
  result.history.push_back({0, batch_loss(head, train), best_loss, best_f1});

  const std::size_t n = head.params().size();
  std::vector<double> m(n, 0.0), v(n, 0.0);
  std::uint64_t step = 0;
  SplitMix64 rng(cfg.seed);
  std::vector<TrainExample> batch;
  int stale = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train[order[k]]);
      epoch_loss += batch_loss(head, batch) * static_cast<double>(batch.size());
      const auto grad = head_gradient(head, batch);

      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      auto& p = head.params();
      for (std::size_t j = 0; j < n; ++j) {
        m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grad[j];
        v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
        const double mh = m[j] / c1;
        const double vh = v[j] / c2;
        p[j] -= cfg.learning_rate *
                (mh / (std::sqrt(vh) + cfg.adam_eps) + cfg.weight_decay * p[j]);
      }
    }
    const double f1 = selector_f1(head, valid);
    const double vloss = batch_loss(head, valid);
    result.history.push_back(
        {epoch, epoch_loss / static_cast<double>(order.size()), vloss, f1});
    if (f1 > best_f1 || (f1 == best_f1 && vloss < best_loss)) {
      best_f1 = f1;
      best_loss = vloss;
      result.head = head;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

std::vector<ScoredPair> select_top_edges(
    std::span<const PredicateSphere> spheres, std::size_t k,
    std::size_t workers) {
  const std::size_t n = spheres.size();
  if (n < 2 || k == 0) return {};
  auto better = [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.premise != b.premise) return a.premise < b.premise;
    return a.hypothesis < b.hypothesis;
  };

  workers = std::max<std::size_t>(workers, 1);
  const std::size_t shards = std::min(n, workers * 4);
  auto shard_top = [&](std::size_t s) {
    const std::size_t lo = n * s / shards;
    const std::size_t hi = n * (s + 1) / shards;
    // Heap whose front is the worst kept pair.
    std::vector<ScoredPair> heap;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        ScoredPair sp{i, j, selector_score(spheres[i], spheres[j])};
        if (heap.size() < k) {
          heap.push_back(sp);
          std::push_heap(heap.begin(), heap.end(), better);
        } else if (better(sp, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), better);
          heap.back() = sp;
          std::push_heap(heap.begin(), heap.end(), better);
        }
      }
    }
    return heap;
  };
  auto parts = unwrap_all(parallel_map(shards, workers, shard_top));
  std::vector<ScoredPair> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end(), better);
  if (all.size() > k) all.resize(k);
  return all;
}

bool transitivity_bound_holds(const PredicateSphere& a,
                              const PredicateSphere& b,
                              const PredicateSphere& c, double eps,
                              bool* qualifies) {
  const bool q = overlap_prob(a, b) > eps && overlap_prob(b, c) > eps;
  if (qualifies) *qualifies = q;
  if (!q) return true;
  const double bound = eps - (1.0 - eps) * b.radius / a.radius;
  return overlap_prob(a, c) > bound - 1e-9;
}

AuditResult transitivity_audit(std::span<const PredicateSphere> spheres,
                           double eps, std::size_t trials,
                           std::uint64_t seed) {
  AuditResult out;
  if (spheres.empty()) return out;
  SplitMix64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& a = spheres[rng.below(spheres.size())];
    const auto& b = spheres[rng.below(spheres.size())];
    const auto& c = spheres[rng.below(spheres.size())];
    bool q = false;
    const bool ok = transitivity_bound_holds(a, b, c, eps, &q);
    ++out.trials;
    out.qualifying += q;
    out.violations += !ok;
  }
  return out;
}

namespace {

double normal(SplitMix64& rng) {
  double u1 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

PredicateSphere offset_sphere(const PredicateSphere& from, double radius,
                              double d, SplitMix64& rng) {
  std::vector<double> dir(from.center.size());
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& x : dir) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  PredicateSphere out{from.center, radius};
  for (std::size_t i = 0; i < dir.size(); ++i) {
    out.center[i] += d * dir[i] / norm;
  }
  return out;
}

// A sphere q with Pr(p -> q) > eps: an enclosure one time in five, a
// partial overlap with a target probability in (eps, 1) otherwise.
PredicateSphere entailed_sphere(const PredicateSphere& p, double eps,
                                SplitMix64& rng) {
  for (;;) {
    const double r_q = p.radius * std::exp(3.0 * rng.uniform() - 1.5);
    if (rng.below(5) == 0) {
      if (r_q < p.radius) continue;
      return offset_sphere(p, r_q, rng.uniform() * (r_q - p.radius), rng);
    }
    const double u = rng.uniform();
    if (u == 0.0) continue;
    const double target = eps + (1.0 - eps) * u;
    const double d = p.radius + r_q - 2.0 * p.radius * target;
    if (d < 0.0) continue;
    return offset_sphere(p, r_q, d, rng);
  }
}

}  // namespace

AuditResult transitivity_audit_constructed(std::size_t dim, double eps,
                                       std::size_t trials,
                                       std::uint64_t seed) {
  AuditResult out;
  SplitMix64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    PredicateSphere a{std::vector<double>(dim), std::exp(4.0 * rng.uniform() - 2.0)};
    for (auto& x : a.center) x = 10.0 * rng.uniform() - 5.0;
    const auto b = entailed_sphere(a, eps, rng);
    const auto c = entailed_sphere(b, eps, rng);
    bool q = false;
    const bool ok = transitivity_bound_holds(a, b, c, eps, &q);
    ++out.trials;
    out.qualifying += q;
    out.violations += !ok;
  }
  return out;
}

// --- checkpoint ------------------------------------------------------------

namespace {

constexpr char kHeadMagic[8] = {'E', 'G', 'G', 'H', 'E', 'A', 'D', '\0'};
constexpr std::uint32_t kHeadVersion = 1;

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& pos, const std::string& src) {
  if (pos + sizeof(T) > buf.size()) throw FormatError(src, 0, "truncated");
  T value;
  std::memcpy(&value, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::uint32_t crc_of(const std::string& buf, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()),
            static_cast<uInt>(len)));
}

}  // namespace

void save_head(const SphereHead& head, const std::filesystem::path& path) {
  std::string buf(kHeadMagic, sizeof(kHeadMagic));
  put<std::uint32_t>(buf, kHeadVersion);
  put<std::uint64_t>(buf, head.dims().input);
  put<std::uint64_t>(buf, head.dims().hidden);
  put<std::uint64_t>(buf, head.dims().center);
  put<std::uint32_t>(buf, head.radius_map() == RadiusMap::kExp ? 0 : 1);
  put<std::uint64_t>(buf, head.params().size());
  for (double x : head.params()) put<double>(buf, x);
  put<std::uint32_t>(buf, crc_of(buf, buf.size()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), 0, "cannot write file");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

SphereHead load_head(const std::filesystem::path& path) {
  const std::string src = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(src, 0, "cannot open file");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kHeadMagic) + 4 ||
      std::memcmp(buf.data(), kHeadMagic, sizeof(kHeadMagic)) != 0) {
    throw FormatError(src, 0, "not a selector head checkpoint");
  }
  std::size_t pos = buf.size() - 4;
  if (take<std::uint32_t>(buf, pos, src) != crc_of(buf, buf.size() - 4)) {
    throw FormatError(src, 0, "checksum mismatch");
  }
  pos = sizeof(kHeadMagic);
  if (take<std::uint32_t>(buf, pos, src) != kHeadVersion) {
    throw FormatError(src, 0, "unsupported checkpoint version");
  }
  HeadDims dims;
  dims.input = take<std::uint64_t>(buf, pos, src);
  dims.hidden = take<std::uint64_t>(buf, pos, src);
  dims.center = take<std::uint64_t>(buf, pos, src);
  const auto tag = take<std::uint32_t>(buf, pos, src);
  if (tag > 1) throw FormatError(src, 0, "unknown radius map tag");
  SphereHead head(dims, tag == 0 ? RadiusMap::kExp : RadiusMap::kSquare);
  const auto count = take<std::uint64_t>(buf, pos, src);
  if (count != head.params().size()) {
    throw FormatError(src, 0, "parameter count does not match dimensions");
  }
  for (auto& x : head.params()) x = take<double>(buf, pos, src);
  if (pos != buf.size() - 4) throw FormatError(src, 0, "trailing bytes");
  return head;
}

std::vector<std::vector<double>> embed_all(Backend& backend,
                                           std::span<const std::string> s) {
  std::vector<std::vector<double>> out;
  out.reserve(s.size());
  for (auto& r : backend.embed_batch(s)) out.push_back(std::move(r.vector));
  return out;
}

}  // namespace egg
