#include "holesynth/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace holesynth {

namespace {

using Json = nlohmann::ordered_json;

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

// Tracks the key path while parsing so that repeated keys can be reported with their field.
class DuplicateKeyDetector {
 public:
  bool operator()(int /*depth*/, nlohmann::detail::parse_event_t event, Json& parsed) {
    using Event = nlohmann::detail::parse_event_t;
    switch (event) {
      case Event::object_start:
        frames_.push_back(Frame{{}, {}, true});
        break;
      case Event::array_start:
        frames_.push_back(Frame{{}, {}, false});
        break;
      case Event::object_end:
      case Event::array_end:
        frames_.pop_back();
        break;
      case Event::key: {
        Frame& top = frames_.back();
        top.current = parsed.get<std::string>();
        if (!top.seen.insert(top.current).second && !duplicate_) {
          duplicate_ = path();
        }
        break;
      }
      case Event::value:
        break;
    }
    return true;
  }

  const std::optional<std::string>& duplicate() const { return duplicate_; }

 private:
  struct Frame {
    std::unordered_set<std::string> seen;
    std::string current;
    bool is_object;
  };

  std::string path() const {
    std::string out;
    for (const Frame& f : frames_) {
      if (f.is_object) {
        out += "/" + f.current;
      }
    }
    return out;
  }

  std::vector<Frame> frames_;
  std::optional<std::string> duplicate_;
};

const Json& field(const Json& object, const std::string& key, const std::string& path) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ParseError(path, "missing field '" + key + "'");
  }
  return *it;
}

std::string as_name(const Json& value, const std::string& path) {
  if (!value.is_string()) {
    throw ParseError(path, "expected a string");
  }
  return value.get<std::string>();
}

}  // namespace

Family parse_sketch(std::string_view text) {
  auto detector = std::make_shared<DuplicateKeyDetector>();
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end(),
                      [detector](int depth, nlohmann::detail::parse_event_t event, Json& parsed) {
                        return (*detector)(depth, event, parsed);
                      });
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_column(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
  }
  if (detector->duplicate()) {
    const std::string& where = *detector->duplicate();
    const std::string what = where.rfind("/parameters/", 0) == 0 ? "duplicate parameter name"
                                                                  : "duplicate key";
    throw ParseError(where, what);
  }
  if (!doc.is_object()) {
    throw ParseError("/", "document must be a JSON object");
  }

  const Json& format = field(doc, "format", "/");
  if (!format.is_string() || format.get<std::string>() != kSketchFormat) {
    throw ParseError("/format", "unsupported format tag, expected \"" +
                                    std::string(kSketchFormat) + "\"");
  }

  const Json& states = field(doc, "states", "/");
  if (!states.is_array() || states.empty()) {
    throw ParseError("/states", "expected a non-empty array of state names");
  }
  std::vector<std::string> state_names;
  std::unordered_map<std::string, StateIndex> state_index;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string path = "/states/" + std::to_string(i);
    std::string name = as_name(states[i], path);
    if (name.empty()) {
      throw ParseError(path, "state name is empty");
    }
    if (!state_index.emplace(name, static_cast<StateIndex>(i)).second) {
      throw ParseError(path, "duplicate state name '" + name + "'");
    }
    state_names.push_back(std::move(name));
  }
  auto resolve_state = [&](const Json& value, const std::string& path) {
    const std::string name = as_name(value, path);
    auto it = state_index.find(name);
    if (it == state_index.end()) {
      throw ParseError(path, "unknown state '" + name + "'");
    }
    return it->second;
  };

  const StateIndex initial = resolve_state(field(doc, "initial", "/"), "/initial");

  const Json& params = field(doc, "parameters", "/");
  if (!params.is_object()) {
    throw ParseError("/parameters", "expected an object mapping names to domains");
  }
  std::vector<Parameter> parameters;
  std::unordered_map<std::string, ParamIndex> param_index;
  for (auto it = params.begin(); it != params.end(); ++it) {
    const std::string path = "/parameters/" + it.key();
    if (it.key().empty()) {
      throw ParseError(path, "parameter name is empty");
    }
    if (!it.value().is_array()) {
      throw ParseError(path, "expected an array of state names");
    }
    if (it.value().empty()) {
      throw ParseError(path, "empty domain");
    }
    Parameter p{it.key(), {}};
    for (std::size_t i = 0; i < it.value().size(); ++i) {
      const std::string vpath = path + "/" + std::to_string(i);
      const StateIndex v = resolve_state(it.value()[i], vpath);
      if (std::find(p.domain.begin(), p.domain.end(), v) != p.domain.end()) {
        throw ParseError(vpath, "duplicate domain value '" + state_names[v] + "'");
      }
      p.domain.push_back(v);
    }
    param_index.emplace(p.name, static_cast<ParamIndex>(parameters.size()));
    parameters.push_back(std::move(p));
  }

  const Json& transitions = field(doc, "transitions", "/");
  if (!transitions.is_object()) {
    throw ParseError("/transitions", "expected an object mapping states to templates");
  }
  std::vector<std::optional<Distribution>> templates(state_names.size());
  for (auto it = transitions.begin(); it != transitions.end(); ++it) {
    const std::string path = "/transitions/" + it.key();
    auto s = state_index.find(it.key());
    if (s == state_index.end()) {
      throw ParseError(path, "unknown state '" + it.key() + "'");
    }
    if (!it.value().is_object() || it.value().empty()) {
      throw ParseError(path, "expected a non-empty object mapping parameters to probabilities");
    }
    std::vector<Entry> entries;
    double sum = 0.0;
    for (auto e = it.value().begin(); e != it.value().end(); ++e) {
      const std::string epath = path + "/" + e.key();
      auto k = param_index.find(e.key());
      if (k == param_index.end()) {
        throw ParseError(epath, "unknown parameter '" + e.key() + "'");
      }
      if (!e.value().is_number()) {
        throw ParseError(epath, "probability must be a number");
      }
      const double p = e.value().get<double>();
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ParseError(epath, "probability outside [0,1]");
      }
      sum += p;
      entries.push_back(Entry{k->second, p});
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      std::ostringstream msg;
      msg << "probabilities of state '" << it.key() << "' sum to " << sum << ", expected 1";
      throw ParseError(path, msg.str());
    }
    templates[s->second] = Distribution(std::move(entries));
  }

  std::vector<Distribution> rows;
  rows.reserve(templates.size());
  for (std::size_t s = 0; s < templates.size(); ++s) {
    if (!templates[s]) {
      throw ParseError("/transitions", "state '" + state_names[s] + "' has no template");
    }
    rows.push_back(std::move(*templates[s]));
  }
  return Family(std::move(state_names), initial, std::move(parameters), std::move(rows));
}

std::string serialize_sketch(const Family& family) {
  Json doc;
  doc["format"] = kSketchFormat;
  doc["states"] = family.state_names();
  doc["initial"] = family.state_name(family.initial());
  Json params = Json::object();
  for (const Parameter& p : family.parameters()) {
    Json domain = Json::array();
    for (StateIndex v : p.domain) {
      domain.push_back(family.state_name(v));
    }
    params[p.name] = std::move(domain);
  }
  doc["parameters"] = std::move(params);
  Json transitions = Json::object();
  for (StateIndex s = 0; s < family.num_states(); ++s) {
    Json row = Json::object();
    for (const Entry& e : family.state_template(s).entries()) {
      row[family.parameter(e.key).name] = e.probability;
    }
    transitions[family.state_name(s)] = std::move(row);
  }
  doc["transitions"] = std::move(transitions);
  return doc.dump(2) + "\n";
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Family load_sketch(const std::string& path) {
  try {
    return parse_sketch(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.location(), std::string(e.what()).substr(e.location().size() + 2));
  }
}

Specification load_specification(const std::string& path, const Family& family) {
  return parse_specification(read_file(path), family);
}

}  // namespace holesynth
