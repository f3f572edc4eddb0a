#include "bcnav/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "bcnav/errors.hpp"

namespace bcnav {

std::string_view to_string(Scope s) { return s == Scope::Online ? "online" : "offline"; }

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Middle: return "middle";
    case Direction::Unset: break;
  }
  return "";
}

std::string_view to_string(Velocity v) {
  switch (v) {
    case Velocity::Slow: return "slow";
    case Velocity::Normal: return "normal";
    case Velocity::Fast: return "fast";
    case Velocity::Unset: break;
  }
  return "";
}

std::string_view to_string(Traversability t) {
  switch (t) {
    case Traversability::Traversable: return "traversable";
    case Traversability::NonTraversable: return "non-traversable";
    case Traversability::Unset: break;
  }
  return "";
}

std::optional<Scope> scope_from_string(std::string_view s) {
  if (s == "offline") return Scope::Offline;
  if (s == "online") return Scope::Online;
  return std::nullopt;
}

std::optional<Direction> direction_from_string(std::string_view s) {
  if (s.empty()) return Direction::Unset;
  if (s == "left") return Direction::Left;
  if (s == "right") return Direction::Right;
  if (s == "middle") return Direction::Middle;
  return std::nullopt;
}

std::optional<Velocity> velocity_from_string(std::string_view s) {
  if (s.empty()) return Velocity::Unset;
  if (s == "slow") return Velocity::Slow;
  if (s == "normal") return Velocity::Normal;
  if (s == "fast") return Velocity::Fast;
  return std::nullopt;
}

std::optional<Traversability> traversability_from_string(std::string_view s) {
  if (s.empty()) return Traversability::Unset;
  if (s == "traversable") return Traversability::Traversable;
  if (s == "non-traversable") return Traversability::NonTraversable;
  return std::nullopt;
}

bool is_valid(const ConstraintTuple& t) {
  return !t.object_label.empty() && t.has_any_field();
}

std::vector<std::string> ConstraintSet::labels() const {
  std::set<std::string> out;
  for (const auto& t : tuples) out.insert(t.object_label);
  return {out.begin(), out.end()};
}

ActiveConstraint ConstraintSet::active(std::string_view label) const {
  ActiveConstraint a;
  a.label = std::string(label);
  for (const auto& t : tuples) {
    if (t.object_label != label) continue;
    if (t.direction != Direction::Unset) a.direction = t.direction;
    if (t.velocity != Velocity::Unset) a.velocity = t.velocity;
    if (t.traversability != Traversability::Unset) a.traversability = t.traversability;
  }
  return a;
}

std::vector<ActiveConstraint> ConstraintSet::active_all() const {
  std::vector<ActiveConstraint> out;
  for (const auto& label : labels()) out.push_back(active(label));
  return out;
}

namespace {

bool field_set(const ConstraintTuple& t, ConstraintField f) {
  switch (f) {
    case ConstraintField::Direction: return t.direction != Direction::Unset;
    case ConstraintField::Velocity: return t.velocity != Velocity::Unset;
    case ConstraintField::Traversability: return t.traversability != Traversability::Unset;
  }
  return false;
}

void clear_field(ConstraintTuple& t, ConstraintField f) {
  switch (f) {
    case ConstraintField::Direction: t.direction = Direction::Unset; break;
    case ConstraintField::Velocity: t.velocity = Velocity::Unset; break;
    case ConstraintField::Traversability: t.traversability = Traversability::Unset; break;
  }
}

constexpr ConstraintField kFields[] = {ConstraintField::Direction, ConstraintField::Velocity,
                                       ConstraintField::Traversability};

}  // namespace

ConstraintSet merge_constraints(const std::vector<ConstraintTuple>& offline,
                                const std::vector<ConstraintTuple>& online, double now) {
  std::vector<ConstraintTuple> all;
  all.reserve(offline.size() + online.size());
  for (const auto& t : offline) all.push_back(t);
  for (const auto& t : online) {
    if (t.scope == Scope::Online && t.issued_at > now) continue;
    all.push_back(t);
  }

  // Precedence key: (online, issued_at, position).
  auto key = [&](std::size_t i) {
    return std::make_tuple(all[i].scope == Scope::Online ? 1 : 0, all[i].issued_at, i);
  };

  std::map<std::pair<std::string, int>, std::size_t> winner;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (ConstraintField f : kFields) {
      if (!field_set(all[i], f)) continue;
      auto slot = std::make_pair(all[i].object_label, static_cast<int>(f));
      auto it = winner.find(slot);
      if (it == winner.end() || key(it->second) < key(i)) winner[slot] = i;
    }
  }

  ConstraintSet out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    ConstraintTuple t = all[i];
    for (ConstraintField f : kFields) {
      if (!field_set(t, f)) continue;
      if (winner.at({t.object_label, static_cast<int>(f)}) != i) clear_field(t, f);
    }
    if (t.has_any_field()) out.tuples.push_back(std::move(t));
  }
  return out;
}

nlohmann::json to_json(const ConstraintTuple& t) {
  nlohmann::json j;
  j["object"] = t.object_label;
  if (t.direction != Direction::Unset) j["direction"] = to_string(t.direction);
  if (t.velocity != Velocity::Unset) j["velocity"] = to_string(t.velocity);
  if (t.traversability != Traversability::Unset) j["traversability"] = to_string(t.traversability);
  j["scope"] = to_string(t.scope);
  j["issued_at"] = t.issued_at;
  return j;
}

namespace {

template <typename Enum>
Enum enum_field(const nlohmann::json& j, const char* name, const std::string& pointer,
                std::optional<Enum> (*convert)(std::string_view)) {
  if (!j.contains(name) || j[name].is_null()) return Enum{};
  if (!j[name].is_string()) throw ParseError(pointer + "/" + name, "expected a string");
  auto v = convert(j[name].get<std::string>());
  if (!v) throw ParseError(pointer + "/" + name, "unknown value '" + j[name].get<std::string>() + "'");
  return *v;
}

}  // namespace

ConstraintTuple tuple_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_object()) throw ParseError(pointer, "expected an object");
  if (!j.contains("object") || !j["object"].is_string())
    throw ParseError(pointer + "/object", "missing object label");
  ConstraintTuple t;
  t.object_label = j["object"].get<std::string>();
  t.direction = enum_field<Direction>(j, "direction", pointer, direction_from_string);
  t.velocity = enum_field<Velocity>(j, "velocity", pointer, velocity_from_string);
  t.traversability = enum_field<Traversability>(j, "traversability", pointer, traversability_from_string);
  if (j.contains("scope")) {
    if (!j["scope"].is_string()) throw ParseError(pointer + "/scope", "expected a string");
    auto s = scope_from_string(j["scope"].get<std::string>());
    if (!s) throw ParseError(pointer + "/scope", "unknown scope");
    t.scope = *s;
  }
  if (j.contains("issued_at")) {
    if (!j["issued_at"].is_number()) throw ParseError(pointer + "/issued_at", "expected a number");
    t.issued_at = j["issued_at"].get<double>();
  }
  return t;
}

nlohmann::json to_json(const ConstraintSet& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : s.tuples) arr.push_back(to_json(t));
  return arr;
}

std::vector<ConstraintTuple> tuples_from_json_text(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("", "malformed JSON");
  std::string base;
  if (j.is_object() && j.contains("constraints")) {
    j = j["constraints"];
    base = "/constraints";
  }
  if (!j.is_array()) throw ParseError(base, "expected an array of constraint tuples");
  std::vector<ConstraintTuple> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(tuple_from_json(j[i], base + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<ConstraintTuple> JsonTextAdapter::parse(const std::string& text) {
  return tuples_from_json_text(fn_(text));
}

ParseResult InstructionParser::parse(const Instruction& instr) const {
  if (!adapter_) return parse_instruction(instr);
  if (std::all_of(instr.text.begin(), instr.text.end(),
                  [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; })) {
    throw InputError("instruction text is empty");
  }

  std::vector<std::string> diagnostics;
  // The adapter runs on a detached worker so a hung endpoint cannot stall the
  // control loop; the shared state outlives an abandoned call.
  auto adapter = adapter_;
  auto task = std::make_shared<std::packaged_task<std::vector<ConstraintTuple>()>>(
      [adapter, text = instr.text] { return adapter->parse(text); });
  auto future = task->get_future();
  std::thread([task] { (*task)(); }).detach();

  std::optional<std::vector<ConstraintTuple>> adapted;
  if (future.wait_for(timeout_) != std::future_status::ready) {
    diagnostics.push_back("adapter timed out; using built-in grammar");
  } else {
    try {
      adapted = future.get();
    } catch (const std::exception& e) {
      diagnostics.push_back(std::string("adapter failed: ") + e.what() + "; using built-in grammar");
    }
  }

  if (adapted) {
    bool ok = true;
    for (auto& t : *adapted) {
      if (!is_valid(t)) {
        diagnostics.push_back("adapter returned a tuple with no populated field; using built-in grammar");
        ok = false;
        break;
      }
      t.scope = instr.scope;
      t.issued_at = instr.issued_at;
    }
    if (ok) return ParseResult{std::move(*adapted), std::move(diagnostics), false};
  }

  ParseResult fallback = parse_instruction(instr);
  fallback.used_fallback = true;
  diagnostics.insert(diagnostics.end(), fallback.diagnostics.begin(), fallback.diagnostics.end());
  fallback.diagnostics = std::move(diagnostics);
  return fallback;
}

}  // namespace bcnav
