#pragma once

#include <stdexcept>
#include <string>

namespace mlio {

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct ZeroRow : std::invalid_argument {
  explicit ZeroRow(int row)
      : std::invalid_argument("constraint row " + std::to_string(row) + " is identically zero"),
        row(row) {}
  int row;
};

struct EmptyFeasibleSet : std::runtime_error {
  explicit EmptyFeasibleSet(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionTooLarge : std::invalid_argument {
  explicit DimensionTooLarge(const std::string& what) : std::invalid_argument(what) {}
};

struct InstanceTooLarge : std::invalid_argument {
  explicit InstanceTooLarge(const std::string& what) : std::invalid_argument(what) {}
};

struct MalformedCsv : std::runtime_error {
  MalformedCsv(int line, const std::string& what)
      : std::runtime_error("csv line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

struct MalformedInput : std::runtime_error {
  explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

struct MissingGroupMap : std::runtime_error {
  MissingGroupMap() : std::runtime_error("nutrient spec has no food-group map") {}
};

}  // namespace mlio
