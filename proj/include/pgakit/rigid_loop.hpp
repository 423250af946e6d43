#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "pgakit/errors.hpp"
#include "pgakit/program.hpp"
#include "pgakit/service.hpp"
#include "pgakit/thread.hpp"

namespace pgakit {

/// Checks a PGArl program. Errors: annotated or unit instructions in the
/// source, a repeated-body jump that lands on itself, a closure directly
/// preceded by a test. Warnings: lonely headers and closures (they act as
/// #1). Positions count prefix then body, 1-based.
std::vector<Diagnostic> validate_pgarl(const CanonicalProgram& program);

struct AnnotatedBody {
  Sequence instructions;
  /// Closure position -> position of its header, both 1-based.
  std::map<std::size_t, std::size_t> header_of;
};

/// Replaces each closure by `n}xm` (its header counts n+1, its body has m
/// instructions; `0}x0` when lonely) and each jump over closures by
/// `#l(j,n)...` listing the closures strictly inside its path in increasing
/// position order. With `wrap` the sequence is treated as a repeated body
/// and jump paths continue at its start.
AnnotatedBody annotate(const Sequence& body, bool wrap);

/// Inverse of annotate: `n}xm` back to `}x`, `#l(...)` back to `#l`.
Sequence erase_annotations(const Sequence& sequence);

/// Tail of the mixed-shape wrapping. `Derived` appends #(k+2);#(k+2) which
/// routes back into the repeated part; `Literal` appends #k;#k.
enum class XiTail { Derived, Literal };

/// (phi(u1);...;phi(uk);#0;#0), phi_i(#n) = #min(n, k+2-i).
Sequence phi(const Sequence& program);

/// (u1;...;uk;xi(v1);...;xi(vm);J;J) with xi_i(#n) = #(n+k+2) when i+n > m.
/// Jumps are first brought into range: body jumps modulo m, prefix jumps by
/// multiples of m so they land no later than vm.
Sequence xi(const Sequence& prefix, const Sequence& body, XiTail tail = XiTail::Derived);

/// The repeated body standing for the whole program: the body itself (jumps
/// normalized), phi of a finite program or xi of a mixed one.
Sequence to_repetition(const CanonicalProgram& program, XiTail tail = XiTail::Derived);

/// The counter-based projection into PGAu: counter initialisations followed
/// by the psi-mapped repetition, one down counter `rlc:i` per closure.
/// Loop-free programs are returned unchanged with no bindings. Throws
/// ValidationError when validate_pgarl reports errors.
ProjectedProgram project_counter(const CanonicalProgram& program, XiTail tail = XiTail::Derived);

/// The meaning of a PGArl program: project_counter, then apply_bindings,
/// trimmed to reachable equations.
LinearSpec defining_thread(const CanonicalProgram& program, XiTail tail = XiTail::Derived);

inline constexpr std::size_t kPureSizeLimit = 1'000'000;

/// Loop-free PGA by unrolling the leftmost loop until none remain. Finite
/// programs are unrolled in place, the others after to_repetition. Throws
/// BudgetExhausted when the result would exceed `size_limit` instructions.
CanonicalProgram project_pure(const CanonicalProgram& program, std::size_t size_limit = kPureSizeLimit);

struct SizeReport {
  std::size_t source_len = 0;
  std::size_t pure_len = 0;
  /// Units counted as one instruction.
  std::size_t counter_len = 0;
  /// Units counted by their bodies.
  std::size_t counter_len_inlined = 0;
  /// Largest product of iteration counts along a chain of nested loops.
  Nat loop_product = 1;
};

SizeReport size_report(const CanonicalProgram& program, std::size_t size_limit = kPureSizeLimit);

}  // namespace pgakit
