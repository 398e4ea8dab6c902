#include <sstream>

#include "cdsh/bench.hpp"
#include "cdsh/error.hpp"
#include "doctest.h"

using namespace cdsh;
using namespace cdsh::bench;

namespace {

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("line fit recovers an exact line") {
  const std::vector<double> xs = {10, 20, 30, 40};
  const std::vector<double> ys = {13.0, 23.0, 33.0, 43.0};
  const LinearFit f = fit_line(xs, ys);
  CHECK(f.slope == doctest::Approx(1.0));
  CHECK(f.intercept == doctest::Approx(3.0));
  CHECK(f.r2 == doctest::Approx(1.0));

  const std::vector<double> noisy = {13.0, 20.0, 36.0, 41.0};
  CHECK(fit_line(xs, noisy).r2 < 1.0);
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(fit_line(one, one), Error);
  const std::vector<double> same_x = {2.0, 2.0};
  CHECK_THROWS_AS(fit_line(same_x, ys), Error);
}

TEST_CASE("operation benchmark rows and ordering") {
  OpsOptions o;
  o.x_samples = 200;
  const auto rows = bench_ops(*Group::production(), o);
  REQUIRE(rows.size() == 5);
  const char* names[] = {"T_a", "xT_a", "T_m", "T_sm", "T_h"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].op == names[i]);
    CHECK(rows[i].samples >= 100);
    CHECK(rows[i].mean_ms > 0);
    CHECK(rows[i].median_ms <= rows[i].p95_ms);
    CHECK(rows[i].group == "p256");
  }
  CHECK(rows[1].samples == 200);
  const double ta = rows[0].mean_ms, tm = rows[2].mean_ms, th = rows[4].mean_ms;
  CHECK(tm > 20 * ta);
  CHECK(th < ta);

  const std::string csv = ops_csv(rows);
  CHECK(csv.rfind("op,description,samples,mean_ms,median_ms,p95_ms,group,machine\n", 0) == 0);
  CHECK(line_count(csv) == 6);

  OpsOptions none;
  none.reps = 0;
  CHECK_THROWS_AS(bench_ops(*Group::toy(), none), Error);
}

TEST_CASE("batch sweep") {
  BatchOptions o;
  o.ns = {1, 4, 8};
  o.trials = 3;
  const BatchSweep s = bench_batch(o);
  REQUIRE(s.points.size() == 3);
  CHECK(s.points[0].n == 1);
  // One message: the same work plus one small multiplication.
  CHECK(s.points[0].batch_ms < 2 * s.points[0].individual_ms);
  CHECK(s.batch_fit.slope > 0);
  const std::string csv = batch_csv(s);
  CHECK(csv.rfind("n,batch_ms,individual_ms,speedup\n", 0) == 0);
  CHECK(line_count(csv) == 4);

  BatchOptions bad;
  bad.ns = {0};
  CHECK_THROWS_AS(bench_batch(bad), Error);
}
