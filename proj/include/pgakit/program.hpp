#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "pgakit/action.hpp"

namespace pgakit {

struct Instruction;
using Sequence = std::vector<Instruction>;

struct Basic {
  Action action;
  friend bool operator==(const Basic&, const Basic&) = default;
};
struct PosTest {
  Action action;
  friend bool operator==(const PosTest&, const PosTest&) = default;
};
struct NegTest {
  Action action;
  friend bool operator==(const NegTest&, const NegTest&) = default;
};
struct Halt {
  friend bool operator==(const Halt&, const Halt&) = default;
};
struct Jump {
  Nat distance = 0;
  friend bool operator==(const Jump&, const Jump&) = default;
};
/// `nx{`, n >= 1.
struct LoopHeader {
  Nat count = 1;
  friend bool operator==(const LoopHeader&, const LoopHeader&) = default;
};
/// `}x`
struct LoopClose {
  friend bool operator==(const LoopClose&, const LoopClose&) = default;
};
/// `n}xm`: closes a loop with n repetitions left after the first pass and a
/// body of m instructions.
struct AnnClose {
  Nat repeats = 0;
  Nat body_size = 0;
  friend bool operator==(const AnnClose&, const AnnClose&) = default;
};
/// One `(j,n)` annotation: reset the counter of the closure at j to n.
struct CounterReset {
  Nat position = 0;
  Nat value = 0;
  friend bool operator==(const CounterReset&, const CounterReset&) = default;
};
/// `#l(j1,n1)...(jk,nk)`
struct AnnJump {
  Nat distance = 0;
  std::vector<CounterReset> resets;
  friend bool operator==(const AnnJump&, const AnnJump&) = default;
};
/// `u(...)`: a nonempty fragment that counts as one instruction from outside.
struct Unit {
  Sequence body;
  friend bool operator==(const Unit&, const Unit&);
};

struct Instruction {
  using Variant = std::variant<Basic, PosTest, NegTest, Halt, Jump, LoopHeader, LoopClose, AnnClose, AnnJump, Unit>;
  Variant value;

  template <class T>
    requires(!std::is_same_v<std::remove_cvref_t<T>, Instruction> && std::is_constructible_v<Variant, T>)
  Instruction(T&& alternative) : value(std::forward<T>(alternative)) {}

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(value);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(value);
  }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&value);
  }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

bool is_rigid_loop_instruction(const Instruction& instruction);
bool is_test(const Instruction& instruction);

/// Outer instruction count; each unit counts as one.
std::size_t outer_length(const Sequence& sequence);
/// Instruction count with unit bodies counted instruction by instruction.
std::size_t inlined_length(const Sequence& sequence);

// ---------------------------------------------------------------------------

/// One concatenated part of a program as written: a finite run of
/// instructions, or a repeated one.
struct ProgramPart {
  Sequence instructions;
  bool repeated = false;
  friend bool operator==(const ProgramPart&, const ProgramPart&) = default;
};

/// A program as written. Anything after the first repeated part is dead code.
struct RawProgram {
  std::vector<ProgramPart> parts;
  friend bool operator==(const RawProgram&, const RawProgram&) = default;
};

/// First canonical form: `X`, `Y^w` or `X;Y^w` with X, Y repetition-free.
struct CanonicalProgram {
  Sequence prefix;
  std::optional<Sequence> body;

  bool is_finite() const noexcept { return !body.has_value(); }
  bool is_pure_repetition() const noexcept { return body.has_value() && prefix.empty(); }
  bool is_mixed() const noexcept { return body.has_value() && !prefix.empty(); }

  friend bool operator==(const CanonicalProgram&, const CanonicalProgram&) = default;
};

bool contains(const CanonicalProgram& program, bool (*predicate)(const Instruction&));

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

/// Throws ParseError with the line and column of the first problem.
RawProgram parse_program(std::string_view text);

/// Shorthand for first_canonical(parse_program(text)).
CanonicalProgram parse_canonical(std::string_view text);

std::string to_string(const Instruction& instruction);
std::string to_string(const Sequence& sequence);
std::string to_string(const RawProgram& program);
std::string to_string(const CanonicalProgram& program);

/// Indented structural dump, one instruction per line.
std::string dump(const RawProgram& program);

// ---------------------------------------------------------------------------
// Instruction sequence congruence
// ---------------------------------------------------------------------------

/// Flattens the parts (PGA1) and drops everything after the first repetition
/// (PGA3). No rotation or period reduction, so positions stay as written.
CanonicalProgram first_canonical(const RawProgram& program);

/// Number of parts that follow the first repeated part.
std::size_t dead_parts(const RawProgram& program);

/// The normal form under PGA1-4: first canonical form, then the repeated
/// body cut to its minimal period (PGA2) and the prefix shortened by
/// absorbing its tail into the body (PGA4).
CanonicalProgram canonicalize(const RawProgram& program);
CanonicalProgram canonicalize(const CanonicalProgram& program);

RawProgram to_raw(const CanonicalProgram& program);

bool congruent(const RawProgram& lhs, const RawProgram& rhs);

/// Reduces every jump in a repeated body of length k to at most k by
/// replacing #m (m > k) with #((m-1) mod k + 1). Throws std::invalid_argument
/// on an empty body.
Sequence normalize_jumps(const Sequence& body);

}  // namespace pgakit
