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

#ifndef EGG_SELECTOR_HPP_
#define EGG_SELECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egg/backend.hpp"

namespace egg {

// Maps the radius network output to a positive radius.
enum class RadiusMap { kExp, kSquare };

std::string_view to_string(RadiusMap m);
// Throws ConfigError for anything but "exp" or "square".
RadiusMap parse_radius_map(std::string_view s);

inline constexpr double kMinSquareRadius = 1e-8;

struct PredicateSphere {
  std::vector<double> center;
  double radius = 1.0;
};

struct HeadDims {
  std::size_t input = 768;
  std::size_t hidden = 16;
  std::size_t center = 16;

  bool operator==(const HeadDims&) const = default;
};

// Two small networks over a frozen sentence embedding v:
//   center = W2c relu(W1c v + b1c) + b2c
//   radius = f+(w2r . relu(W1r v + b1r) + b2r)
// Parameters live in one flat vector in the order
//   W1c, b1c, W2c, b2c, W1r, b1r, w2r, b2r   (matrices row-major).
class SphereHead {
 public:
  SphereHead(HeadDims dims, RadiusMap map);

  // Uniform in +-1/sqrt(fan_in) for every weight and bias.
  static SphereHead initialized(HeadDims dims, RadiusMap map,
                                std::uint64_t seed);

  const HeadDims& dims() const noexcept { return dims_; }
  RadiusMap radius_map() const noexcept { return map_; }
  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }
  static std::size_t param_count(const HeadDims& d);

  // Throws DimensionMismatch unless v.size() == dims().input.
  PredicateSphere sphere(std::span<const double> v) const;
  // Radius network output before f+.
  double radius_logit(std::span<const double> v) const;
  double radius_from_logit(double z) const;

  bool operator==(const SphereHead&) const = default;

 private:
  friend struct HeadLayout;
  HeadDims dims_;
  RadiusMap map_;
  std::vector<double> params_;
};

// Entailment probability of p -> q from diameter overlap along the line
// joining the centers.
double overlap_prob(double r_p, double r_q, double d);
double overlap_prob(const PredicateSphere& p, const PredicateSphere& q);

// Smoothed, differentiable selector score sigmoid(2 (r_q - d) / r_p).
double selector_score(double r_p, double r_q, double d);
double selector_score(const PredicateSphere& p, const PredicateSphere& q);

double center_distance(const PredicateSphere& p, const PredicateSphere& q);
double sigmoid(double x);

struct TrainExample {
  std::span<const double> premise;
  std::span<const double> hypothesis;
  double target = 0.0;  // 1 entails, 0 not
};

// Mean binary cross-entropy of selector_score against the targets.
double batch_loss(const SphereHead& head, std::span<const TrainExample> batch);

// Analytic gradient of batch_loss with respect to head.params(). At
// coincident centers the distance term contributes zero.
std::vector<double> head_gradient(const SphereHead& head,
                                  std::span<const TrainExample> batch);

struct SelectorTrainConfig {
  double learning_rate = 5e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int positive_repeat = 5;
  int patience = 10;
  int max_epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double valid_f1 = 0.0;
};

struct TrainResult {
  SphereHead head;
  int best_epoch = 0;  // 0 = the initial parameters
  std::vector<EpochStats> history;
};

// F1 of (selector_score > 0.5) against targets.
double selector_f1(const SphereHead& head, std::span<const TrainExample> data);

// Trains `init` on `train`, keeping the parameters with the best validation
// F1 (ties: lower validation loss). Positives are repeated
// cfg.positive_repeat times per epoch. Stops after cfg.patience epochs
// without improvement. Throws DegenerateData when `train` holds a single
// class. An empty `valid` falls back to `train`.
TrainResult train_head(const SphereHead& init,
                       std::span<const TrainExample> train,
                       std::span<const TrainExample> valid,
                       const SelectorTrainConfig& cfg);

struct ScoredPair {
  std::size_t premise = 0;
  std::size_t hypothesis = 0;
  double score = 0.0;
};

// The k ordered pairs (i != j) with the highest selector_score, best first;
// ties go to the smaller (i, j). All pairs when k >= n (n - 1). Scoring is
// sharded over premises on up to `workers` threads.
std::vector<ScoredPair> select_top_edges(
    std::span<const PredicateSphere> spheres, std::size_t k,
    std::size_t workers = 1);

struct AuditResult {
  std::size_t trials = 0;
  std::size_t qualifying = 0;  // both premise links above the threshold
  std::size_t violations = 0;
};

// Checks the soft-transitivity lower bound
//   Pr(a->c) > eps - (1 - eps) r_b / r_a
// on triples whose links a->b and b->c exceed eps, with slack 1e-9.
bool transitivity_bound_holds(const PredicateSphere& a,
                              const PredicateSphere& b,
                              const PredicateSphere& c, double eps,
                              bool* qualifies = nullptr);

// Random index triples drawn from `spheres`.
AuditResult transitivity_audit(std::span<const PredicateSphere> spheres,
                           double eps, std::size_t trials,
                           std::uint64_t seed);

// Triples constructed so both premise links exceed eps (partial overlaps
// and enclosures mixed), in `dim` dimensions.
AuditResult transitivity_audit_constructed(std::size_t dim, double eps,
                                       std::size_t trials,
                                       std::uint64_t seed);

// Versioned binary checkpoint with a CRC-32 trailer.
void save_head(const SphereHead& head, const std::filesystem::path& path);
SphereHead load_head(const std::filesystem::path& path);

// Embeds every sentence through the backend, in order.
std::vector<std::vector<double>> embed_all(Backend& backend,
                                           std::span<const std::string> s);

}  // namespace egg

#endif  // EGG_SELECTOR_HPP_
