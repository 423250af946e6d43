#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pgakit/action.hpp"

namespace pgakit {

// ---------------------------------------------------------------------------
// Finite threads
// ---------------------------------------------------------------------------

/// An immutable finite thread: S, D, or a postconditional composition
/// `on_true <| action |> on_false`. Subterms are shared, so approximations of
/// regular threads stay polynomial in size even when their trees are not.
class FiniteThread {
 public:
  enum class Kind { Termination, Deadlock, PostConditional };

  static FiniteThread termination();
  static FiniteThread deadlock();
  static FiniteThread post_conditional(FiniteThread on_true, Action action, FiniteThread on_false);
  /// `action o next`, shorthand for `next <| action |> next`.
  static FiniteThread prefix(Action action, FiniteThread next);

  Kind kind() const noexcept;
  bool is_termination() const noexcept { return kind() == Kind::Termination; }
  bool is_deadlock() const noexcept { return kind() == Kind::Deadlock; }

  /// Precondition for the accessors below: kind() == PostConditional.
  const Action& action() const;
  const FiniteThread& on_true() const;
  const FiniteThread& on_false() const;

  /// Number of postconditional nodes on the longest path.
  std::size_t depth() const;

  /// Address of the shared node; equal identities imply equal threads.
  const void* identity() const noexcept { return node_.get(); }
  bool same_node(const FiniteThread& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const FiniteThread& lhs, const FiniteThread& rhs);

 private:
  struct Node;
  explicit FiniteThread(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// The approximation order: D below everything, postconditional composition
/// monotone in both arguments.
bool is_below(const FiniteThread& lhs, const FiniteThread& rhs);

/// `S`, `D`, `a o P` for prefixes and `(P <a> Q)` otherwise.
std::string to_string(const FiniteThread& thread);

// ---------------------------------------------------------------------------
// Linear recursive specifications
// ---------------------------------------------------------------------------

struct Termination {
  friend bool operator==(const Termination&, const Termination&) = default;
};
struct Deadlock {
  friend bool operator==(const Deadlock&, const Deadlock&) = default;
};
/// `X_on_true <| action |> X_on_false`, indices are 0-based.
struct PostConditional {
  std::size_t on_true = 0;
  Action action;
  std::size_t on_false = 0;
  friend bool operator==(const PostConditional&, const PostConditional&) = default;
};

using Equation = std::variant<Termination, Deadlock, PostConditional>;

/// A finite linear recursive specification with a distinguished root.
/// Equations are stored 0-based and printed 1-based (`X1` is index 0).
struct LinearSpec {
  std::vector<Equation> equations;
  std::size_t root = 0;

  std::size_t size() const noexcept { return equations.size(); }
  friend bool operator==(const LinearSpec&, const LinearSpec&) = default;
};

struct SpecIssue {
  std::size_t equation = 0;  // 1-based, 0 for spec-wide issues
  std::string message;
  friend bool operator==(const SpecIssue&, const SpecIssue&) = default;
};

/// Empty iff every index is in range, n >= 1 and every action is well formed.
std::vector<SpecIssue> validate_spec(const LinearSpec& spec);

/// Throws ValidationError when validate_spec reports anything.
void require_valid(const LinearSpec& spec);

/// pi(n, X_state) unfolded on demand; throws ValidationError on a bad spec or
/// state index.
FiniteThread pi(std::size_t depth, const LinearSpec& spec, std::size_t state);

/// Disjoint union: `lhs` keeps its indices, `rhs` is shifted by lhs.size().
/// The root of the result is lhs.root.
LinearSpec disjoint_union(const LinearSpec& lhs, const LinearSpec& rhs);

/// Whether the thread of `lhs` is below the thread of `rhs` (exact).
bool refines(const LinearSpec& lhs, const LinearSpec& rhs);

/// Compares pi(depth, root lhs) and pi(depth, root rhs) in the disjoint union.
bool refines_at_depth(const LinearSpec& lhs, const LinearSpec& rhs, std::size_t depth);

struct TraceStep {
  Action action;
  bool reply = true;
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

/// A shortest path on which two threads disagree, and what each side does
/// at its end (`S`, `D` or the action it performs).
struct Witness {
  std::vector<TraceStep> path;
  std::string lhs;
  std::string rhs;
};

std::string to_string(const Witness& witness);

struct EqualityResult {
  bool equal = true;
  std::optional<Witness> witness;
  explicit operator bool() const noexcept { return equal; }
};

EqualityResult thread_equal(const LinearSpec& lhs, const LinearSpec& rhs);

/// Keeps only equations reachable from the root, renumbered in BFS order.
LinearSpec trim_unreachable(const LinearSpec& spec);

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// Environment replies, consumed front to back.
class ReplyScript {
 public:
  ReplyScript() = default;
  explicit ReplyScript(std::vector<bool> replies) : replies_(std::move(replies)) {}

  /// Accepts `T`/`F`/`1`/`0` characters, ignoring commas and whitespace.
  static ReplyScript parse(std::string_view text);

  std::optional<bool> next();
  std::size_t consumed() const noexcept { return cursor_; }
  std::size_t size() const noexcept { return replies_.size(); }

 private:
  std::vector<bool> replies_;
  std::size_t cursor_ = 0;
};

enum class TraceStatus { Termination, Deadlock, ScriptExhausted, StepLimit, BudgetExhausted };

std::string_view to_string(TraceStatus status);

struct Trace {
  std::vector<TraceStep> steps;
  TraceStatus status = TraceStatus::Deadlock;
};

std::string to_string(const Trace& trace);

/// Runs from the root, taking one reply per postconditional node.
Trace simulate_thread(const LinearSpec& spec, ReplyScript script, std::size_t max_steps);
Trace simulate_thread(const FiniteThread& thread, ReplyScript script, std::size_t max_steps);

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

/// `root N` followed by one `Xi = ...` line per equation.
std::string to_text(const LinearSpec& spec);

/// Inverse of to_text; equation lines may come in any order but must cover
/// X1..Xn exactly once. Throws ParseError.
LinearSpec parse_spec(std::string_view text);

}  // namespace pgakit
