#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "mesh_oracle.hpp"
#include "qgps/errors.hpp"
#include "qgps/pattern_search.hpp"

using namespace qgps;

namespace {

Matrix cols(std::initializer_list<std::initializer_list<double>> columns) {
  const auto p = static_cast<Eigen::Index>(columns.size());
  const auto n = static_cast<Eigen::Index>(columns.begin()->size());
  Matrix m(n, p);
  Eigen::Index j = 0;
  for (const auto& c : columns) {
    Eigen::Index i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

PatternBasis line_basis() {
  Matrix g(1, 1);
  g << 1;
  IntMatrix z(1, 2);
  z << 1, -1;
  return {g, z};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MeshState at(Vector x, double delta, double f = 0.0) {
  MeshState s;
  s.iterate = std::move(x);
  s.mesh_size = delta;
  s.incumbent_value = f;
  return s;
}

// Angular sweep: every unit direction on a fine grid must lie in the cone of
// some pair of columns (n = 2 only).
bool angular_coverage(const Matrix& d, int samples = 7200) {
  for (int k = 0; k < samples; ++k) {
    const double a = 2 * std::numbers::pi * k / samples;
    const double vx = std::cos(a), vy = std::sin(a);
    bool covered = false;
    for (Eigen::Index i = 0; i < d.cols() && !covered; ++i) {
      // A single column pointing exactly along v.
      const double cross = d(0, i) * vy - d(1, i) * vx;
      if (std::abs(cross) < 1e-12 && d(0, i) * vx + d(1, i) * vy > 0) covered = true;
      for (Eigen::Index j = i + 1; j < d.cols() && !covered; ++j) {
        const double det = d(0, i) * d(1, j) - d(1, i) * d(0, j);
        if (std::abs(det) < 1e-12) continue;
        const double l1 = (vx * d(1, j) - vy * d(0, j)) / det;
        const double l2 = (d(0, i) * vy - d(1, i) * vx) / det;
        covered = l1 >= -1e-12 && l2 >= -1e-12;
      }
    }
    if (!covered) return false;
  }
  return true;
}

double square(const Vector& x) { return x.squaredNorm(); }

}  // namespace

TEST_CASE("positive spanning examples") {
  CHECK(positive_spanning_check(cols({{1, 0}, {0, 1}, {-1, 0}, {0, -1}})));
  CHECK_FALSE(positive_spanning_check(cols({{1, 0}, {0, 1}})));
  const Matrix tri = cols({{1, 0}, {-1, 1}, {-1, -1}});
  CHECK(angular_coverage(tri));
  CHECK(positive_spanning_check(tri));
  CHECK_THROWS_AS(positive_spanning_check(Matrix(0, 3)), DimensionMismatchError);
}

TEST_CASE("positive spanning agrees with an angular sweep on random 2-D sets") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  int agree = 0, total = 0, spanning = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const int p = 3 + rep % 4;
    Matrix d(2, p);
    for (int j = 0; j < p; ++j) {
      const double a = ang(rng);
      d(0, j) = std::cos(a);
      d(1, j) = std::sin(a);
    }
    const bool want = angular_coverage(d, 3600);
    spanning += want;
    agree += positive_spanning_check(d) == want;
    ++total;
  }
  CHECK(agree == total);
  CHECK(spanning > 30);  // both outcomes exercised
  CHECK(spanning < total - 30);
}

TEST_CASE("positive spanning in higher dimensions") {
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    const Matrix id = Matrix::Identity(n, n);
    Matrix both(n, 2 * n);
    both << id, -id;
    CHECK(positive_spanning_check(both));
    CHECK_FALSE(positive_spanning_check(id));
    // Minimal positive basis: e_1..e_n and -(1,...,1).
    Matrix minimal(n, n + 1);
    minimal << id, -Vector::Ones(n);
    CHECK(positive_spanning_check(minimal));
    // Everything in the closed half-space x_1 >= 0.
    if (n > 1) {
      Matrix half(n, 2 * n);
      half << id, -id;
      half.col(n) = Vector::Unit(n, 0) + Vector::Unit(n, 1);
      CHECK_FALSE(positive_spanning_check(half));
    }
    // Rank deficient.
    Matrix flat = both;
    flat.row(0).setZero();
    CHECK_FALSE(positive_spanning_check(flat));
  }
}

TEST_CASE("pattern basis validation") {
  CHECK_NOTHROW(PatternBasis::coordinate(3));
  CHECK(PatternBasis::coordinate(3).size() == 6);
  Matrix singular = Matrix::Zero(2, 2);
  IntMatrix z(2, 4);
  z << 1, 0, -1, 0, 0, 1, 0, -1;
  CHECK_THROWS(PatternBasis(singular, z));
  IntMatrix half(2, 2);
  half << 1, 0, 0, 1;
  CHECK_THROWS_AS(PatternBasis(Matrix::Identity(2, 2), half), NotPositiveSpanningError);
  Matrix scaled(2, 2);
  scaled << 2, 0, 1, 1;
  const PatternBasis sheared(scaled, z);
  CHECK(sheared.directions() == scaled * z.cast<double>());
}

TEST_CASE("mesh_point examples") {
  const PatternBasis b1 = line_basis();
  IntVector z0 = IntVector::Zero(2);
  CHECK(mesh_point(at(vec({0.75}), 0.5), b1, z0) == vec({0.75}));
  IntVector z1(2);
  z1 << 3, 0;
  CHECK(mesh_point(at(vec({0.75}), 0.5), b1, z1) == vec({2.25}));
  IntVector z2(4);
  z2 << 1, 0, 0, 2;
  CHECK(mesh_point(at(vec({1, 1}), 1.0), PatternBasis::coordinate(2), z2) == vec({2, -1}));
  CHECK_THROWS_AS(mesh_point(at(vec({1, 1}), 1.0), PatternBasis::coordinate(2), z1), DimensionMismatchError);
}

TEST_CASE("poll_set examples") {
  const auto p1 = poll_set(at(vec({0}), 0.25), line_basis().directions());
  REQUIRE(p1.size() == 2);
  CHECK(p1[0] == vec({0.25}));
  CHECK(p1[1] == vec({-0.25}));
  const auto p2 = poll_set(at(vec({0, 0}), 1.0), PatternBasis::coordinate(2).directions());
  REQUIRE(p2.size() == 4);
  CHECK(p2[0] == vec({1, 0}));
  CHECK(p2[1] == vec({0, 1}));
  CHECK(p2[2] == vec({-1, 0}));
  CHECK(p2[3] == vec({0, -1}));
  CHECK_THROWS_AS(poll_set(at(vec({0, 0}), 1.0), Matrix::Identity(2, 2)), NotPositiveSpanningError);
}

TEST_CASE("poll_step examples") {
  auto sq = [](const Vector& x) { return x(0) * x(0); };
  {
    OracleLedger ledger;
    std::vector<Vector> seen;
    auto r = poll_step(at(vec({1}), 0.5, 1.0), line_basis(), sq, ledger, &seen);
    REQUIRE(std::holds_alternative<ImprovedPoint>(r));
    CHECK(std::get<ImprovedPoint>(r).point == vec({0.5}));
    CHECK(std::get<ImprovedPoint>(r).value == 0.25);
    CHECK(ledger.classical_calls == 2);
    CHECK(seen.size() == 2);
  }
  {
    OracleLedger ledger;
    auto r = poll_step(at(vec({0}), 0.5, 0.0), line_basis(), sq, ledger);
    CHECK(std::holds_alternative<MeshLocalOptimizer>(r));
    CHECK(ledger.classical_calls == 2);
  }
  {
    OracleLedger ledger;
    auto r = poll_step(at(vec({3, -1}), 0.125, 4.0), PatternBasis::coordinate(2),
                       [](const Vector&) { return 4.0; }, ledger);
    CHECK(std::holds_alternative<MeshLocalOptimizer>(r));
    CHECK(ledger.classical_calls == 4);
    CHECK(ledger.quantum_calls == 0);
  }
}

TEST_CASE("poll at a strict minimizer of a convex quadratic becomes a mesh local optimizer") {
  // x_k is the minimizer of f = (x - 0.3)^2 + 10 (y + 0.2)^2, so once a mesh
  // size polls no improvement no smaller one does either.
  auto f = [](const Vector& x) { return std::pow(x(0) - 0.3, 2) + 10 * std::pow(x(1) + 0.2, 2); };
  const Vector xk = vec({0.3, -0.2});
  bool seen_optimizer = false;
  for (double delta = 1.0; delta > 1e-3; delta /= 2) {
    OracleLedger ledger;
    const bool opt = std::holds_alternative<MeshLocalOptimizer>(
        poll_step(at(xk, delta, f(xk)), PatternBasis::coordinate(2), f, ledger));
    if (seen_optimizer) CHECK(opt);
    seen_optimizer = seen_optimizer || opt;
  }
  CHECK(seen_optimizer);
}

TEST_CASE("update_mesh examples") {
  GpsConfig cfg;
  cfg.expansion_factor = 2.0;
  const MeshState s = at(vec({1, 2}), 1.0, 5.0);
  const MeshState up = update_mesh(s, ImprovedPoint{vec({0, 2}), 4.0}, cfg);
  CHECK(up.mesh_size == 2.0);
  CHECK(up.iterate == vec({0, 2}));
  CHECK(up.incumbent_value == 4.0);
  CHECK(up.iteration == 1);
  const MeshState down = update_mesh(s, MeshLocalOptimizer{}, cfg);
  CHECK(down.mesh_size == 0.5);
  CHECK(down.iterate == s.iterate);
  CHECK(down.incumbent_value == 5.0);
}

TEST_CASE("gps config validation") {
  CHECK_NOTHROW(GpsConfig{}.validate());
  auto bad = [](auto mutate) {
    GpsConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS(bad([](GpsConfig& c) { c.expansion_factor = 1.5; }).validate());
  CHECK_THROWS(bad([](GpsConfig& c) { c.contraction_factor = 0.3; }).validate());
  CHECK_THROWS(bad([](GpsConfig& c) { c.contraction_factor = 1.0; }).validate());
  CHECK_THROWS(bad([](GpsConfig& c) { c.search_points_count = 12; }).validate());
  CHECK_THROWS(bad([](GpsConfig& c) { c.initial_mesh_size = 0; }).validate());
  CHECK_THROWS(bad([](GpsConfig& c) { c.search_radius = 0; }).validate());
  CHECK_NOTHROW(bad([](GpsConfig& c) { c.contraction_factor = 0.25; }).validate());
}

TEST_CASE("select_search_points: membership, distinctness, exclusion of x_k") {
  const PatternBasis basis = PatternBasis::coordinate(2);
  GpsConfig cfg;
  const reference::MeshOracle oracle(basis, cfg.search_radius);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MeshState s = at(vec({1.5, -0.25}), std::ldexp(1.0, -static_cast<int>(seed % 8)));
    Rng rng = search_point_rng(seed, 0);
    const SearchPoints sp = select_search_points(s, basis, cfg, rng);
    REQUIRE(sp.points.size() == cfg.search_points_count);
    REQUIRE(sp.encoded.size() == sp.points.size());
    std::set<BitString> distinct(sp.encoded.begin(), sp.encoded.end());
    CHECK(distinct.size() == sp.points.size());
    for (std::size_t i = 0; i < sp.points.size(); ++i) {
      CHECK(oracle.on_mesh(sp.points[i], s.iterate, s.mesh_size));
      CHECK(sp.points[i] != s.iterate);
      const std::vector<double> x(sp.points[i].data(), sp.points[i].data() + 2);
      CHECK(sp.encoded[i] == encode_point(x, cfg.fixed_point_format));
    }
    Rng again = search_point_rng(seed, 0);
    CHECK(select_search_points(s, basis, cfg, again).encoded == sp.encoded);
  }
}

TEST_CASE("select_search_points errors") {
  GpsConfig cfg;
  cfg.search_radius = 1;
  cfg.search_points_count = 4;
  Rng rng(0);
  // Nonzero z in {0,1}^2 reaches only x - 1 and x + 1.
  CHECK_THROWS_AS(select_search_points(at(vec({0}), 1.0), line_basis(), cfg, rng), MeshExhaustedError);
  cfg.search_points_count = 2;
  CHECK(select_search_points(at(vec({0}), 1.0), line_basis(), cfg, rng).points.size() == 2);

  GpsConfig fine;
  CHECK_THROWS_AS(select_search_points(at(vec({0, 0}), 0x1p-20), PatternBasis::coordinate(2), fine, rng),
                  EncodingError);
}

TEST_CASE("select_search_points skips points outside the encodable range") {
  GpsConfig cfg;
  cfg.fixed_point_format = {8, 0};  // [-128, 127]
  cfg.search_radius = 8;
  cfg.search_points_count = 8;
  Rng rng(1);
  const auto sp = select_search_points(at(vec({124}), 1.0), line_basis(), cfg, rng);
  CHECK(sp.points.size() == 8);
  for (const auto& p : sp.points) CHECK(p(0) <= 127);
}

TEST_CASE("classical search step") {
  OracleLedger ledger;
  std::vector<Vector> pts;
  for (int i = 0; i < 16; ++i) pts.push_back(vec({static_cast<double>(i)}));
  auto none = classical_search_step(pts, [](const Vector&) { return 1.0; }, 1.0, ledger);
  CHECK(std::holds_alternative<SearchFailure>(none));
  CHECK(ledger.classical_calls == 16);

  OracleLedger first;
  auto hit = classical_search_step(pts, [](const Vector& x) { return x(0) == 0 ? 0.0 : 1.0; }, 1.0, first);
  REQUIRE(std::holds_alternative<ImprovedPoint>(hit));
  CHECK(first.classical_calls == 1);
}

TEST_CASE("classical search mean calls with one random improving point") {
  const int n = 16, trials = 20000;
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) pts.push_back(vec({static_cast<double>(i)}));
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> where(0, n - 1);
  OracleLedger ledger;
  for (int t = 0; t < trials; ++t) {
    const int w = where(rng);
    classical_search_step(pts, [w](const Vector& x) { return x(0) == w ? -1.0 : 1.0; }, 0.0, ledger);
  }
  const double mean = static_cast<double>(ledger.classical_calls) / trials;
  const double sigma = std::sqrt((n * n - 1) / 12.0 / trials);
  CHECK(std::abs(mean - (n + 1) / 2.0) <= 3 * sigma);
}

TEST_CASE("gps on x^2 from 1 with the classical backend") {
  GpsConfig cfg;
  cfg.initial_mesh_size = 0.5;
  cfg.search_points_count = 2;
  cfg.search_radius = 2;
  const PatternBasis basis = line_basis();
  auto f = [](const Vector& x) { return x(0) * x(0); };
  const GpsResult r = gps_run(f, basis, vec({1}), cfg, classical_backend(basis, cfg, f));
  CHECK(r.termination == Termination::kMeshTolerance);
  CHECK(std::abs(r.final_state.iterate(0)) <= cfg.mesh_size_tolerance);
  CHECK(r.trace.size() < 100);
  CHECK(r.final_state.mesh_size < cfg.mesh_size_tolerance);
}

TEST_CASE("constant objective only contracts") {
  GpsConfig cfg;
  const PatternBasis basis = PatternBasis::coordinate(2);
  auto f = [](const Vector&) { return 3.0; };
  const GpsResult r = gps_run(f, basis, vec({1, 1}), cfg, classical_backend(basis, cfg, f));
  CHECK(r.termination == Termination::kMeshTolerance);
  REQUIRE(r.trace.size() == 11);  // 1 -> 2^-11 < 2^-10
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].outcome == IterationOutcome::kMeshLocalOptimizer);
    CHECK(r.trace[k].mesh_size == std::ldexp(1.0, -static_cast<int>(k)));
  }
  // f(x_0) plus N search and 2n poll evaluations per iteration.
  CHECK(r.ledger.classical_calls == 1 + 11 * (16 + 4));
}

TEST_CASE("trace invariants on the classical backend") {
  const PatternBasis basis = PatternBasis::coordinate(2);
  auto f = [](const Vector& x) { return std::pow(x(0) - 1.25, 2) + 3 * std::pow(x(1) + 0.5, 2) + x(0) * x(1); };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GpsConfig cfg;
    cfg.rng_seed = seed;
    cfg.expansion_factor = seed % 2 ? 2.0 : 1.0;
    const reference::MeshOracle oracle(basis, cfg.search_radius);
    const GpsResult r = gps_run(f, basis, vec({-3, 2}), cfg, classical_backend(basis, cfg, f));
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      const auto& rec = r.trace[k];
      CHECK(rec.iteration == static_cast<std::int64_t>(k));
      const int e = std::ilogb(rec.mesh_size);
      CHECK(rec.mesh_size == std::ldexp(1.0, e));  // Delta_0 = 1, factors powers of two
      for (const auto& c : rec.candidates) CHECK(oracle.on_mesh(c, rec.iterate, rec.mesh_size));
      CHECK(rec.ledger_snapshot.quantum_calls == 0);
      if (k + 1 < r.trace.size()) {
        const auto& next = r.trace[k + 1];
        CHECK(next.value <= rec.value);
        const bool contracted = next.iterate == rec.iterate && next.mesh_size < rec.mesh_size;
        CHECK((rec.outcome == IterationOutcome::kMeshLocalOptimizer) == contracted);
      }
    }
  }
}

TEST_CASE("oracle budget and iteration cap are recorded, not thrown") {
  const PatternBasis basis = PatternBasis::coordinate(2);
  auto f = [](const Vector& x) { return x.squaredNorm(); };
  GpsConfig cfg;
  cfg.oracle_budget = 50;
  GpsResult r = gps_run(f, basis, vec({5, 5}), cfg, classical_backend(basis, cfg, f));
  CHECK(r.termination == Termination::kBudgetExhausted);
  CHECK(r.ledger.total_calls() >= 50);
  cfg.oracle_budget = 0;
  cfg.max_iterations = 3;
  r = gps_run(f, basis, vec({5, 5}), cfg, classical_backend(basis, cfg, f));
  CHECK(r.termination == Termination::kIterationCap);
  CHECK(r.trace.size() == 3);
  CHECK_THROWS_AS(gps_run(f, basis, vec({0.1, 0}), cfg, classical_backend(basis, cfg, f)), EncodingError);
  CHECK_THROWS_AS(gps_run(f, basis, vec({1}), cfg, classical_backend(basis, cfg, f)), DimensionMismatchError);
}

TEST_CASE("classical backend converges on a sphere") {
  const PatternBasis basis = PatternBasis::coordinate(3);
  GpsConfig cfg;
  const GpsResult r = gps_run(square, basis, vec({3, -2, 1}), cfg, classical_backend(basis, cfg, square));
  CHECK(r.termination == Termination::kMeshTolerance);
  CHECK(r.final_state.iterate.norm() <= 10 * cfg.mesh_size_tolerance);
}
