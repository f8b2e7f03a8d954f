#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "holesynth/errors.hpp"
#include "holesynth/family.hpp"
#include "holesynth/numerics.hpp"

namespace holesynth {

inline constexpr std::string_view kSketchFormat = "mc-family/1";

/// Input error with a location: "line:column" for syntax errors, a JSON-pointer-like field
/// path ("/transitions/s1") for semantic ones.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::string location, const std::string& message)
      : InvalidArgument(location + ": " + message), location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Parses a sketch document:
///
///   {
///     "format": "mc-family/1",
///     "states": ["s0", "s1", ...],
///     "initial": "s0",
///     "parameters": {"X": ["s1", "s2"], ...},
///     "transitions": {"s0": {"X": 1.0}, ...}
///   }
Family parse_sketch(std::string_view text);
std::string serialize_sketch(const Family& family);

Family load_sketch(const std::string& path);

/// One line of a specification file: a threshold property or an optimization objective.
using PropertyLine = std::variant<Property, Objective>;

/// Grammar: "P<=0.3 [F t u]", "P>=0.5 [F t]", "min P [F t]", "max P [F t] eps=0.05".
PropertyLine parse_property(std::string_view text, const Family& family);

/// One property per line; blank lines and lines starting with '#' are ignored; at most one
/// objective line.
Specification parse_specification(std::string_view text, const Family& family);
Specification load_specification(const std::string& path, const Family& family);

}  // namespace holesynth
