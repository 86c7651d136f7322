#include "qgps/app/objectives.hpp"

#include <cmath>

namespace qgps::app {
namespace {

Vector alternating(std::size_t n, double even, double odd) {
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = i % 2 == 0 ? even : odd;
  return x;
}

std::vector<ObjectiveEntry> build_registry() {
  std::vector<ObjectiveEntry> entries;

  entries.push_back({"sphere", "sum of x_i^2", 1, 0,
                     [](std::size_t) -> Objective {
                       return [](const Vector& x) { return x.squaredNorm(); };
                     },
                     [](std::size_t n) { return alternating(n, 3.0, -2.0); }});

  // Weights 100^(i/(n-1)): condition number exactly 100.
  entries.push_back({"quadratic100", "sum of w_i x_i^2 with weights spanning 1..100 (condition number 100)",
                     2, 0,
                     [](std::size_t n) -> Objective {
                       Vector w(static_cast<Eigen::Index>(n));
                       for (std::size_t i = 0; i < n; ++i) {
                         w(static_cast<Eigen::Index>(i)) =
                             std::pow(100.0, static_cast<double>(i) / static_cast<double>(n - 1));
                       }
                       return [w](const Vector& x) { return (w.array() * x.array().square()).sum(); };
                     },
                     [](std::size_t n) { return alternating(n, 2.0, -1.5); }});

  entries.push_back({"rosenbrock", "(1 - x)^2 + 100 (y - x^2)^2", 2, 2,
                     [](std::size_t) -> Objective {
                       return [](const Vector& x) {
                         const double a = 1.0 - x(0);
                         const double b = x(1) - x(0) * x(0);
                         return a * a + 100.0 * b * b;
                       };
                     },
                     [](std::size_t) {
                       Vector x(2);
                       x << -1.5, 2.0;
                       return x;
                     }});

  // Piecewise constant: flat on unit cells, so many search steps have no
  // improving point at all.
  entries.push_back({"plateau", "sum of floor(|x_i|)", 1, 0,
                     [](std::size_t) -> Objective {
                       return [](const Vector& x) { return x.cwiseAbs().array().floor().sum(); };
                     },
                     [](std::size_t n) { return alternating(n, 3.5, -2.5); }});
  return entries;
}

}  // namespace

const std::vector<ObjectiveEntry>& objective_registry() {
  static const std::vector<ObjectiveEntry> registry = build_registry();
  return registry;
}

const ObjectiveEntry& find_objective(const std::string& name) {
  for (const auto& e : objective_registry()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : objective_registry()) known += (known.empty() ? "" : ", ") + e.name;
  throw UnknownObjectiveError("unknown objective '" + name + "'; registered objectives: " + known);
}

Objective make_objective(const std::string& name, std::size_t dimension) {
  const ObjectiveEntry& entry = find_objective(name);
  if (dimension < entry.min_dimension ||
      (entry.max_dimension != 0 && dimension > entry.max_dimension)) {
    throw DimensionMismatchError("objective '" + name + "' does not support dimension " +
                                 std::to_string(dimension));
  }
  return entry.make(dimension);
}

}  // namespace qgps::app
