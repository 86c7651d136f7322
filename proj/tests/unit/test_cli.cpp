#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qgps/app/commands.hpp"
#include "qgps/app/objectives.hpp"
#include "qgps/app/run_config.hpp"
#include "qgps/errors.hpp"

using namespace qgps;
using namespace qgps::app;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in, "test.cfg");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<nlohmann::json> lines_of(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qgps_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse(
      "# comment line\n"
      "objective = rosenbrock\n"
      "dimension = 2\n"
      "\n"
      "initial_point = -1.5, 2   # trailing comment\n"
      "backend = classical\n"
      "seed = 7\n"
      "tau = 0.05\n"
      "search_points = 32\n"
      "expansion_factor = 2\n"
      "planted_improving = 3\n");
  CHECK(c.objective_name == "rosenbrock");
  CHECK(c.initial_point == std::vector<double>{-1.5, 2});
  CHECK(c.backend == Backend::kClassical);
  CHECK(c.seed == 7);
  CHECK(c.qsearch.tau == 0.05);
  CHECK(c.gps.search_points_count == 32);
  CHECK(c.gps.expansion_factor == 2.0);
  REQUIRE(c.planted_improving.has_value());
  CHECK(*c.planted_improving == 3);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("test.cfg:") == 0);
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("objective = sphere\nbogus_key = 1\n") == 2);
  CHECK(line_of("\n\n# c\ndimension = two\n") == 4);
  CHECK(line_of("seed = 1\nno equals sign here\n") == 2);
  CHECK(line_of("tau = 0.1x\n") == 1);
  CHECK(line_of("backend = analog\n") == 1);
  CHECK(line_of("seed = -3\n") == 1);
  CHECK(line_of("initial_point = 1, , 2\n") == 1);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse("objective = nope\n").validate(), UnknownObjectiveError);
  CHECK_THROWS_AS(parse("objective = rosenbrock\ndimension = 3\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("dimension = 3\ninitial_point = 1, 2\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("c = 2.5\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("search_points = 12\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("trials = 0\n").validate(), ConfigError);
  RunConfig c;
  apply_setting(c, "objective", "plateau");
  apply_setting(c, "dimension", "3");
  CHECK(c.objective_name == "plateau");
  CHECK_THROWS_AS(apply_setting(c, "nope", "1"), ConfigError);
  CHECK(config_keys().size() >= 20);
}

TEST_CASE("objective registry") {
  std::vector<std::string> names;
  for (const auto& e : objective_registry()) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"sphere", "quadratic100", "rosenbrock", "plateau"});

  try {
    find_objective("nope");
    FAIL("expected UnknownObjectiveError");
  } catch (const UnknownObjectiveError& e) {
    for (const auto& n : names) CHECK(std::string(e.what()).find(n) != std::string::npos);
  }

  const Objective q = make_objective("quadratic100", 3);
  CHECK(q(Vector::Unit(3, 0)) == doctest::Approx(1.0));
  CHECK(q(Vector::Unit(3, 1)) == doctest::Approx(10.0));
  CHECK(q(Vector::Unit(3, 2)) == doctest::Approx(100.0));
  const Objective r = make_objective("rosenbrock", 2);
  CHECK(r(Vector::Ones(2)) == 0.0);
  Vector x(2);
  x << -1.5, 2.0;
  CHECK(r(x) == doctest::Approx(12.5));
  const Objective p = make_objective("plateau", 2);
  x << 3.5, -2.5;
  CHECK(p(x) == 5.0);
  CHECK_THROWS(make_objective("rosenbrock", 3));

  for (const auto& e : objective_registry()) {
    for (std::size_t n = e.min_dimension; n <= (e.max_dimension ? e.max_dimension : 4); ++n) {
      const Vector start = e.default_start(n);
      CHECK(static_cast<std::size_t>(start.size()) == n);
      for (Eigen::Index i = 0; i < start.size(); ++i) CHECK(is_representable(start(i), GpsConfig{}.fixed_point_format));
    }
  }
}

TEST_CASE("run: sphere, quantum backend, seed 7") {
  RunConfig c = parse("objective = sphere\ndimension = 2\nbackend = quantum\nseed = 7\n");
  std::ostringstream out, err;
  REQUIRE(run_command(c, out, err) == 0);
  const auto records = lines_of(out.str());
  REQUIRE(records.size() >= 2);
  const auto& summary = records.back();
  CHECK(summary["type"] == "summary");
  CHECK(summary["final_mesh_size"].get<double>() < c.gps.mesh_size_tolerance);
  CHECK(summary["termination"] == "mesh-tolerance");
  CHECK(summary["seed"] == 7);
  CHECK(summary["config"]["objective"] == "sphere");
  CHECK(summary["config"]["seed"] == 7);
  double previous = INFINITY;
  std::int64_t k = 0;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const auto& r = records[i];
    CHECK(r["type"] == "iteration");
    CHECK(r["k"] == k++);
    CHECK(r["f"].get<double>() <= previous);
    previous = r["f"].get<double>();
    for (const char* key : {"x", "delta", "outcome", "classical_calls", "quantum_calls", "qsearch_rounds"}) {
      CHECK(r.contains(key));
    }
  }
  CHECK(summary["iterations"] == k);
}

TEST_CASE("run traces are bit-reproducible") {
  for (const char* backend : {"classical", "quantum"}) {
    RunConfig c = parse(std::string("objective = rosenbrock\ndimension = 2\ntrials = 3\nseed = 11\nbackend = ") +
                        backend + "\nmax_iterations = 40\n");
    std::ostringstream a, b, e;
    c.workers = 1;
    REQUIRE(run_command(c, a, e) == 0);
    c.workers = 3;
    REQUIRE(run_command(c, b, e) == 0);
    CHECK(a.str() == b.str());
    CHECK(lines_of(a.str()).back()["trial"] == 2);
  }
}

TEST_CASE("unknown objective exits nonzero naming the registry") {
  RunConfig c;
  c.objective_name = "nope";
  std::ostringstream out, err;
  CHECK(run_command(c, out, err) != 0);
  for (const char* n : {"sphere", "quadratic100", "rosenbrock", "plateau"}) {
    CHECK(err.str().find(n) != std::string::npos);
  }
}

TEST_CASE("demo-amplify rows") {
  const auto exact = demo_amplify(4, 1, 3, 1000, 0);
  REQUIRE(exact.size() == 4);
  CHECK(exact[1].analytic == doctest::Approx(1.0));
  CHECK(exact[1].empirical == 1.0);

  for (const auto& row : demo_amplify(16, 0, 6, 1000, 0)) {
    CHECK(row.analytic == 0.0);
    CHECK(row.simulated < 1e-12);
    CHECK(row.empirical == 0.0);
  }

  const auto rows = demo_amplify(16, 1, 10, 100000, 3);
  for (const auto& row : rows) {
    CAPTURE(row.j);
    CHECK(std::abs(row.simulated - row.analytic) < 1e-9);
    CHECK(row.abs_error <= 3 * row.sigma + 1e-12);
  }
  CHECK_THROWS_AS(demo_amplify(12, 1, 3, 10, 0), DomainError);
  CHECK_THROWS_AS(demo_amplify(8, 9, 3, 10, 0), DomainError);
}

TEST_CASE("compare report") {
  RunConfig c = parse("objective = sphere\ndimension = 2\ntrials = 20\nsearch_points = 16\nplanted_improving = 16\n");
  std::ostringstream out, err;
  REQUIRE(compare_command(c, out, err) == 0);
  std::vector<nlohmann::json> rows;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.front() == '{') rows.push_back(nlohmann::json::parse(line));
  }
  REQUIRE(rows.size() == 21);
  const auto& summary = rows.back();
  CHECK(summary["type"] == "comparison_summary");
  CHECK(summary.contains("tau"));
  CHECK(summary.contains("miss_rate"));
  CHECK(summary["mean_classical_calls"].get<double>() <= 2.0);
  CHECK(summary["mean_quantum_calls"].get<double>() <= 2.0);
  CHECK(out.str().find("observed miss rate") != std::string::npos);
}

#ifdef QGPS_CLI_PATH
TEST_CASE("command-line binary") {
  const std::string exe = QGPS_CLI_PATH;
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "objective = quadratic100\ndimension = 2\nbackend = quantum\nseed = 5\n";
  }
  const fs::path t1 = scratch("trace1.jsonl"), t2 = scratch("trace2.jsonl");
  CHECK(std::system((exe + " run -c " + cfg.string() + " -s output=" + t1.string()).c_str()) == 0);
  CHECK(std::system((exe + " run -c " + cfg.string() + " -s output=" + t2.string()).c_str()) == 0);
  const std::string a = slurp(t1);
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(t2));

  const fs::path err = scratch("err.txt");
  const int status = std::system((exe + " run -c " + cfg.string() + " -s objective=nope 2> " + err.string()).c_str());
  CHECK(status != 0);
  CHECK(slurp(err).find("rosenbrock") != std::string::npos);

  const fs::path bad = scratch("bad.cfg");
  {
    std::ofstream f(bad);
    f << "objective = sphere\n\nsearch_radius = many\n";
  }
  CHECK(std::system((exe + " run -c " + bad.string() + " 2> " + err.string()).c_str()) != 0);
  CHECK(slurp(err).find(":3:") != std::string::npos);

  const fs::path listing = scratch("list.txt");
  CHECK(std::system((exe + " list-objectives > " + listing.string()).c_str()) == 0);
  CHECK(slurp(listing).find("plateau") != std::string::npos);
}
#endif
