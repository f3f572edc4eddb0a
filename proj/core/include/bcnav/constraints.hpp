#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace bcnav {

enum class Scope { Offline, Online };
enum class Direction { Unset, Left, Right, Middle };
enum class Velocity { Unset, Slow, Normal, Fast };
enum class Traversability { Unset, Traversable, NonTraversable };

/// Spellings used on the wire: "left", "slow", "non-traversable", ...
/// Unset maps to the empty string.
std::string_view to_string(Scope s);
std::string_view to_string(Direction d);
std::string_view to_string(Velocity v);
std::string_view to_string(Traversability t);

std::optional<Scope> scope_from_string(std::string_view s);
std::optional<Direction> direction_from_string(std::string_view s);
std::optional<Velocity> velocity_from_string(std::string_view s);
std::optional<Traversability> traversability_from_string(std::string_view s);

struct Instruction {
  std::string text;
  Scope scope = Scope::Offline;
  double issued_at = 0.0;  // simulated seconds; 0 for offline
};

/// One structured behavioral constraint (object, direction, velocity, traversability).
struct ConstraintTuple {
  std::string object_label;
  Direction direction = Direction::Unset;
  Velocity velocity = Velocity::Unset;
  Traversability traversability = Traversability::Unset;
  Scope scope = Scope::Offline;
  double issued_at = 0.0;

  bool operator==(const ConstraintTuple&) const = default;

  bool has_any_field() const {
    return direction != Direction::Unset || velocity != Velocity::Unset ||
           traversability != Traversability::Unset;
  }
};

/// Non-empty label and at least one populated field.
bool is_valid(const ConstraintTuple& t);

enum class ConstraintField { Direction, Velocity, Traversability };

/// Active values for one object label after conflict resolution.
struct ActiveConstraint {
  std::string label;
  Direction direction = Direction::Unset;
  Velocity velocity = Velocity::Unset;
  Traversability traversability = Traversability::Unset;

  bool operator==(const ActiveConstraint&) const = default;
};

struct ConstraintSet {
  std::vector<ConstraintTuple> tuples;

  bool operator==(const ConstraintSet&) const = default;

  /// Distinct labels, sorted.
  std::vector<std::string> labels() const;
  ActiveConstraint active(std::string_view label) const;
  std::vector<ActiveConstraint> active_all() const;
};

/// Union of both lists with per-(label, field) conflicts resolved: online beats
/// offline, later issued_at beats earlier, later list position breaks remaining
/// ties. Online tuples issued after `now` are ignored. Overridden fields are
/// cleared from the losing tuple; tuples left with no field are dropped.
ConstraintSet merge_constraints(const std::vector<ConstraintTuple>& offline,
                                const std::vector<ConstraintTuple>& online, double now);

struct ParseResult {
  std::vector<ConstraintTuple> tuples;
  std::vector<std::string> diagnostics;
  bool used_fallback = false;
};

/// Deterministic controlled-English grammar. Throws InputError on empty text.
ParseResult parse_instruction(const Instruction& instr);

/// Pluggable external parser (e.g. an LLM endpoint). Implementations may
/// throw on malformed output; the caller treats that as a failure.
class ParserAdapter {
 public:
  virtual ~ParserAdapter() = default;
  virtual std::vector<ConstraintTuple> parse(const std::string& text) = 0;
};

/// Adapter around a callable that returns tuples as JSON text (an array of
/// tuple objects, or {"constraints": [...]}).
class JsonTextAdapter final : public ParserAdapter {
 public:
  explicit JsonTextAdapter(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
  std::vector<ConstraintTuple> parse(const std::string& text) override;

 private:
  std::function<std::string(const std::string&)> fn_;
};

/// Routes instructions through an optional adapter with a timeout, validating
/// its output; any adapter failure falls back to parse_instruction.
class InstructionParser {
 public:
  InstructionParser() = default;
  InstructionParser(std::shared_ptr<ParserAdapter> adapter, std::chrono::milliseconds timeout)
      : adapter_(std::move(adapter)), timeout_(timeout) {}

  ParseResult parse(const Instruction& instr) const;
  bool has_adapter() const { return adapter_ != nullptr; }

 private:
  std::shared_ptr<ParserAdapter> adapter_;
  std::chrono::milliseconds timeout_{2000};
};

nlohmann::json to_json(const ConstraintTuple& t);
/// Throws ParseError (pointer relative to `t`) on unknown spellings or missing object.
ConstraintTuple tuple_from_json(const nlohmann::json& j, const std::string& pointer = "");
nlohmann::json to_json(const ConstraintSet& s);
/// Parses a JSON array of tuples (or {"constraints": [...]}); throws ParseError.
std::vector<ConstraintTuple> tuples_from_json_text(std::string_view text);

}  // namespace bcnav
