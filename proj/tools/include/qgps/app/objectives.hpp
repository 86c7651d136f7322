#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qgps/errors.hpp"
#include "qgps/pattern_search.hpp"

namespace qgps::app {

class UnknownObjectiveError : public Error {
 public:
  using Error::Error;
};

struct ObjectiveEntry {
  std::string name;
  std::string description;
  std::size_t min_dimension = 1;
  std::size_t max_dimension = 0;  // 0 = unbounded
  std::function<Objective(std::size_t dimension)> make;
  // Dyadic starting point used when a config gives none.
  std::function<Vector(std::size_t dimension)> default_start;
};

// sphere, quadratic100, rosenbrock, plateau.
const std::vector<ObjectiveEntry>& objective_registry();

// Throws UnknownObjectiveError naming every registered objective.
const ObjectiveEntry& find_objective(const std::string& name);

// Builds the objective for `dimension`, checking the supported range.
Objective make_objective(const std::string& name, std::size_t dimension);

}  // namespace qgps::app
