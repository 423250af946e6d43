#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgakit/action.hpp"
#include "pgakit/program.hpp"
#include "pgakit/thread.hpp"

namespace pgakit {

/// The part of an action after the focus: `dec`, `inc`, `set:5`.
struct CoAction {
  std::string method;
  std::optional<Nat> argument;

  friend auto operator<=>(const CoAction&, const CoAction&) = default;
  friend bool operator==(const CoAction&, const CoAction&) = default;
};

std::string to_string(const CoAction& co_action);

using ServiceState = Nat;

struct Reply {
  bool value = false;
  ServiceState next = 0;
  friend bool operator==(const Reply&, const Reply&) = default;
};

/// A counter service as an explicit state machine over natural-number
/// states. Values are immutable; step returns the successor state.
class Service {
 public:
  /// Co-actions `dec` and `set:n` for n <= max. Throws std::invalid_argument
  /// when initial > max.
  static Service down_counter(Nat initial, Nat max);
  /// Co-actions `inc`, `dec` and `set:n` for every n; no finite enumeration.
  static Service full_counter(Nat initial = 0);

  ServiceState initial() const noexcept { return initial_; }
  Service with_initial(ServiceState state) const;

  bool accepts(const CoAction& co_action) const;
  /// Nullopt for a co-action outside the alphabet.
  std::optional<Reply> step(ServiceState state, const CoAction& co_action) const;

  bool has_enumeration() const noexcept { return max_.has_value(); }
  /// Every reachable state, ascending. Throws std::logic_error without one.
  std::vector<ServiceState> enumeration() const;

  /// `dc(init=0,max=3)` or `counter(init=0)`, the binding syntax.
  std::string describe() const;

  friend bool operator==(const Service&, const Service&) = default;

 private:
  enum class Kind { Down, Full };
  Service(Kind kind, Nat initial, std::optional<Nat> max) : kind_(kind), initial_(initial), max_(max) {}

  Kind kind_;
  Nat initial_;
  std::optional<Nat> max_;
};

struct Binding {
  std::string focus;
  Service service;
  friend bool operator==(const Binding&, const Binding&) = default;
};

/// `focus=dc(init=N,max=N)` or `focus=counter(init=N)`; arguments may be
/// omitted (init defaults to 0, max to init). Throws ParseError.
Binding parse_binding(std::string_view text);
std::string to_string(const Binding& binding);

/// A PGAu program together with the services its foci are bound to.
struct ProjectedProgram {
  CanonicalProgram program;
  std::vector<Binding> bindings;
};

/// Throws ValidationError if two bindings share a focus.
void require_distinct_foci(const std::vector<Binding>& bindings);

/// spec /focus service by product construction. Consumed actions are silent;
/// a cycle of silent steps becomes D. Throws ValidationError when the
/// service has no enumeration.
LinearSpec apply_use_finite(const LinearSpec& spec, std::string_view focus, const Service& service);

enum class UseStatus { Complete, BudgetExhausted };

struct BoundedUse {
  FiniteThread thread;
  UseStatus status = UseStatus::Complete;
};

/// Longest run of consecutive silent steps explored before giving up.
inline constexpr std::size_t kSilentRunLimit = 1'000'000;

/// pi(depth) of spec /focus service, explored on the fly. Silent steps do not
/// count toward depth. A silent run that revisits a state is D; one longer
/// than the budget is cut to D and reported as BudgetExhausted.
BoundedUse apply_use_bounded(const LinearSpec& spec, std::string_view focus, const Service& service,
                             std::size_t depth, std::size_t silent_limit = kSilentRunLimit);

/// Runs spec with every bound focus answered by its service and every other
/// action answered from the script.
Trace simulate_using(const LinearSpec& spec, const std::vector<Binding>& bindings, ReplyScript script,
                     std::size_t max_steps, std::size_t silent_limit = kSilentRunLimit);

/// extract_pgau of the program, then apply_use_finite for each binding from
/// left to right.
LinearSpec apply_bindings(const ProjectedProgram& projected);

}  // namespace pgakit
