#include "cdsh/bench.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "cdsh/error.hpp"
#include "cdsh/sha256.hpp"

namespace cdsh::bench {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchReport summarize(std::string op, std::string description, std::vector<double> samples,
                      const Group& g) {
  BenchReport r;
  r.op = std::move(op);
  r.description = std::move(description);
  r.samples = samples.size();
  r.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  r.median_ms = median_of(samples);
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * samples.size()));
  r.p95_ms = samples[std::max<std::size_t>(rank, 1) - 1];
  r.machine = machine_descriptor();
  r.group = g.name();
  return r;
}

// Runs `body(i)` warmup + reps times and keeps the last reps durations.
template <typename F>
std::vector<double> time_loop(std::size_t warmup, std::size_t reps, F&& body) {
  std::vector<double> out;
  out.reserve(reps);
  for (std::size_t i = 0; i < warmup + reps; ++i) {
    const auto t0 = Clock::now();
    body(i);
    const double dt = ms_since(t0);
    if (i >= warmup) out.push_back(dt);
  }
  return out;
}

// Keeps the optimizer from discarding benchmark results.
volatile std::uint64_t g_sink = 0;
void consume(const Point& p) { g_sink = g_sink + p.x().limb[0]; }
void consume(const Digest& d) { g_sink = g_sink + d[0]; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string machine_descriptor() {
  std::ostringstream os;
  utsname u{};
  if (uname(&u) == 0) os << u.sysname << ' ' << u.release << ' ' << u.machine;
  os << "; " << std::thread::hardware_concurrency() << " threads";
#if defined(__clang__)
  os << "; clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  os << "; gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
  return os.str();
}

std::vector<BenchReport> bench_ops(const Group& g, const OpsOptions& opts) {
  if (opts.reps == 0) throw Error(ErrorCode::kConfig, "reps must be positive");
  if (opts.zeta == 0 || opts.zeta > 32) throw Error(ErrorCode::kConfig, "zeta must be in [1, 32]");
  Rng rng(opts.seed);
  const std::size_t pool_size = opts.warmup + opts.reps;

  std::vector<Point> points;
  std::vector<Scalar> scalars;
  for (std::size_t i = 0; i < std::max<std::size_t>(pool_size, 257); ++i) {
    scalars.push_back(g.random_scalar(rng));
    points.push_back(g.mul_base(scalars.back()));
  }

  std::vector<BenchReport> rows;
  rows.push_back(summarize("T_a", "point addition", time_loop(opts.warmup, opts.reps, [&](std::size_t i) {
                             consume(g.add(points[i], points[i + 1]));
                           }),
                           g));

  // x additions of distinct points, x uniform in [1, 256].
  std::vector<double> xs_times;
  for (std::size_t i = 0; i < opts.warmup + opts.x_samples; ++i) {
    const std::size_t x = 1 + rng.uniform(256);
    const std::size_t off = rng.uniform(points.size() - x + 1);
    const auto t0 = Clock::now();
    consume(g.sum(std::span(points).subspan(off, x)));
    const double dt = ms_since(t0);
    if (i >= opts.warmup) xs_times.push_back(dt);
  }
  rows.push_back(summarize("xT_a", "x-fold point addition, x in [1,256]", std::move(xs_times), g));

  rows.push_back(summarize("T_m", "scalar multiplication", time_loop(opts.warmup, opts.reps, [&](std::size_t i) {
                             consume(g.mul(scalars[i], points[i + 1]));
                           }),
                           g));

  const std::uint64_t small_bound = std::uint64_t{1} << opts.zeta;
  rows.push_back(summarize("T_sm", "multiplication by a zeta-bit factor",
                           time_loop(opts.warmup, opts.reps, [&](std::size_t i) {
                             const ScalarPoint term{g.scalar(1 + rng.uniform(small_bound)), points[i]};
                             consume(g.msm(std::span(&term, 1)));
                           }),
                           g));

  Bytes input(64);
  rng.fill(input);
  rows.push_back(summarize("T_h", "SHA-256 of 64 bytes", time_loop(opts.warmup, opts.reps, [&](std::size_t i) {
                             input[0] = static_cast<std::uint8_t>(i);
                             consume(sha256(input));
                           }),
                           g));
  return rows;
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error(ErrorCode::kConfig, "fit needs two or more points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::kConfig, "fit needs two distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

BatchSweep bench_batch(const BatchOptions& opts) {
  if (opts.ns.empty()) throw Error(ErrorCode::kConfig, "no batch sizes given");
  if (opts.trials == 0) throw Error(ErrorCode::kConfig, "trials must be positive");
  const std::size_t max_n = *std::max_element(opts.ns.begin(), opts.ns.end());
  if (*std::min_element(opts.ns.begin(), opts.ns.end()) == 0) {
    throw Error(ErrorCode::kConfig, "batch sizes must be at least 1");
  }

  sim::WorldConfig cfg;
  cfg.seed = opts.seed;
  cfg.group = opts.group;
  cfg.zeta = opts.zeta;
  cfg.domains = 1;
  cfg.es_per_domain = 1;
  cfg.sd_per_domain = static_cast<std::uint32_t>(std::min<std::size_t>(max_n, 16));
  cfg.validate();
  sim::World w(cfg);
  const SystemParams& sp = w.params();
  const std::string es = w.domains()[0].es_ids[0];
  const LedgerDirectory dir(w.ledger(), w.es_token(es), es);
  const auto& devs = w.domains()[0].devices;

  std::vector<UploadMessage> pool;
  const Bytes m(64, 0x42);
  for (std::size_t i = 0; i < max_n; ++i) {
    pool.push_back(protocol::make_upload(sp, w.device(devs[i % devs.size()]).creds, m, "bench", w.now(),
                                         w.rng()));
  }

  auto batch_once = [&](std::size_t n) {
    const auto t0 = Clock::now();
    std::vector<Point> pks;
    pks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pks.push_back(protocol::resolve_upload(sp, w.es_secret(), pool[i], dir).pk);
    const bool ok = protocol::batch_verify(sp, std::span(pool).first(n), pks, opts.zeta, w.rng());
    const double dt = ms_since(t0);
    if (!ok) throw Error(ErrorCode::kSignatureInvalid, "honest batch rejected");
    return dt;
  };
  auto individual_once = [&](std::size_t n) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) {
      protocol::verify_upload(sp, w.es_secret(), pool[i], dir, w.now(), cfg.delta);
    }
    return ms_since(t0);
  };
  batch_once(1);
  individual_once(1);

  // Trials are interleaved across n so transient load does not bias one point.
  const std::size_t k = opts.ns.size();
  std::vector<std::vector<double>> b(k), ind(k);
  for (std::size_t t = 0; t < opts.trials; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      b[i].push_back(batch_once(opts.ns[i]));
      ind[i].push_back(individual_once(opts.ns[i]));
    }
  }

  BatchSweep sweep;
  std::vector<double> xs, yb, yi;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t n = opts.ns[i];
    sweep.points.push_back({n, median_of(b[i]), median_of(ind[i])});
    xs.push_back(static_cast<double>(n));
    yb.push_back(sweep.points.back().batch_ms);
    yi.push_back(sweep.points.back().individual_ms);
  }
  if (xs.size() >= 2) {
    sweep.batch_fit = fit_line(xs, yb);
    sweep.individual_fit = fit_line(xs, yi);
  }
  return sweep;
}

std::string ops_csv(std::span<const BenchReport> rows) {
  std::ostringstream os;
  os.precision(6);
  os << "op,description,samples,mean_ms,median_ms,p95_ms,group,machine\n";
  for (const auto& r : rows) {
    os << r.op << ',' << csv_field(r.description) << ',' << r.samples << ',' << std::fixed << r.mean_ms << ','
       << r.median_ms << ',' << r.p95_ms << ',' << r.group << ',' << csv_field(r.machine) << '\n';
    os.unsetf(std::ios::floatfield);
  }
  return os.str();
}

std::string batch_csv(const BatchSweep& sweep) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << "n,batch_ms,individual_ms,speedup\n";
  for (const auto& p : sweep.points) {
    os << p.n << ',' << p.batch_ms << ',' << p.individual_ms << ',' << p.individual_ms / p.batch_ms << '\n';
  }
  return os.str();
}

}  // namespace cdsh::bench
