#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdsh/group.hpp"
#include "cdsh/sim.hpp"

namespace cdsh::bench {

/// Timing summary for one primitive. Durations in milliseconds.
struct BenchReport {
  std::string op;
  std::string description;
  std::size_t samples = 0;
  double mean_ms = 0;
  double median_ms = 0;
  double p95_ms = 0;
  std::string machine;
  std::string group;
};

struct OpsOptions {
  std::size_t reps = 100;
  std::size_t warmup = 10;
  /// Draws of x in [1, 256] for the x-fold addition row.
  std::size_t x_samples = 1000;
  unsigned zeta = kDefaultZeta;
  std::uint64_t seed = 1;
};

/// Rows T_a, xT_a, T_m, T_sm, T_h. Throws Error(kConfig) if reps is 0.
std::vector<BenchReport> bench_ops(const Group& g, const OpsOptions& opts);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

/// Least squares y = slope*x + intercept. Needs two distinct x values.
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct BatchPoint {
  std::size_t n = 0;
  double batch_ms = 0;       // identity recovery + key derivation + one batch check
  double individual_ms = 0;  // n full single verifications
};

struct BatchSweep {
  std::vector<BatchPoint> points;
  LinearFit batch_fit;
  LinearFit individual_fit;
};

struct BatchOptions {
  std::vector<std::size_t> ns = {1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  unsigned zeta = kDefaultZeta;
  /// Median over this many runs per n.
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  std::string group = "production";
};

BatchSweep bench_batch(const BatchOptions& opts);

std::string machine_descriptor();

/// op,description,samples,mean_ms,median_ms,p95_ms,group,machine
std::string ops_csv(std::span<const BenchReport> rows);
/// n,batch_ms,individual_ms,speedup
std::string batch_csv(const BatchSweep& sweep);

}  // namespace cdsh::bench
