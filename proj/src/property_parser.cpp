#include <cctype>
#include <charconv>
#include <cmath>

#include "holesynth/sketch.hpp"

namespace holesynth {

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool at_end() {
    skip_space();
    return pos_ == text_.size();
  }
  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  // Maximal run of characters that are neither whitespace nor one of `stops`.
  std::string_view word(std::string_view stops) {
    skip_space();
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           stops.find(text_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
    return text_.substr(begin, pos_ - begin);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail(std::string_view text, const std::string& message) {
  throw InvalidArgument("property \"" + std::string(text) + "\": " + message);
}

double parse_number(std::string_view text, std::string_view token, const char* what) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    fail(text, std::string("malformed ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

PropertyLine parse_property(std::string_view text, const Family& family) {
  Scanner in(text);
  std::optional<Optimize> optimize;
  Direction direction = Direction::AtMost;
  double threshold = 0.0;

  if (in.accept("min")) {
    optimize = Optimize::Minimize;
  } else if (in.accept("max")) {
    optimize = Optimize::Maximize;
  }
  if (!in.accept("P")) {
    fail(text, "expected 'P<=λ', 'P>=λ', 'min P' or 'max P'");
  }
  if (!optimize) {
    if (in.accept("<=")) {
      direction = Direction::AtMost;
    } else if (in.accept(">=")) {
      direction = Direction::AtLeast;
    } else {
      fail(text, "expected '<=' or '>=' after 'P'");
    }
    threshold = parse_number(text, in.word("["), "threshold");
    if (threshold < 0.0 || threshold > 1.0) {
      fail(text, "malformed threshold: " + std::to_string(threshold) + " is outside [0,1]");
    }
  }

  if (!in.accept("[") || !in.accept("F")) {
    fail(text, "expected '[F target ...]'");
  }
  std::vector<StateIndex> target;
  while (true) {
    const std::string_view name = in.word("]");
    if (name.empty()) {
      break;
    }
    const auto s = family.find_state(name);
    if (!s) {
      fail(text, "unknown target state '" + std::string(name) + "'");
    }
    target.push_back(*s);
  }
  if (!in.accept("]")) {
    fail(text, "missing ']'");
  }
  if (target.empty()) {
    fail(text, "empty target list");
  }

  double epsilon = 0.0;
  if (in.accept("eps")) {
    if (!optimize) {
      fail(text, "'eps' is only allowed on min/max objectives");
    }
    if (!in.accept("=")) {
      fail(text, "expected '=' after 'eps'");
    }
    epsilon = parse_number(text, in.word(""), "epsilon");
    if (epsilon < 0.0 || epsilon >= 1.0) {
      fail(text, "epsilon must lie in [0,1)");
    }
  }
  if (!in.at_end()) {
    fail(text, "unexpected trailing text");
  }

  if (optimize) {
    return Objective{*optimize, make_state_set(std::move(target)), epsilon};
  }
  return make_property(direction, threshold, make_state_set(std::move(target)));
}

Specification parse_specification(std::string_view text, const Family& family) {
  Specification spec;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;

    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      continue;
    }
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    PropertyLine parsed = [&] {
      try {
        return parse_property(line, family);
      } catch (const InvalidArgument& e) {
        throw ParseError("line " + std::to_string(line_no), e.what());
      }
    }();
    if (auto* p = std::get_if<Property>(&parsed)) {
      spec.properties.push_back(std::move(*p));
    } else {
      if (spec.objective) {
        throw ParseError("line " + std::to_string(line_no), "more than one objective");
      }
      spec.objective = std::get<Objective>(std::move(parsed));
    }
  }
  if (spec.properties.empty() && !spec.objective) {
    throw ParseError("specification", "no properties");
  }
  return spec;
}

}  // namespace holesynth
