#pragma once

#include "pgakit/program.hpp"
#include "pgakit/thread.hpp"

namespace pgakit {

/// Thread extraction for plain PGA. Throws ValidationError if the program
/// contains units, rigid-loop or annotated instructions.
LinearSpec extract_pga(const CanonicalProgram& program);

/// Thread extraction for PGAu: each unit counts as one instruction for
/// outside jumps and is entered at its first instruction. Throws
/// ValidationError on rigid-loop or annotated instructions.
LinearSpec extract_pgau(const CanonicalProgram& program);

/// A PGA program for the thread of `spec`: the root equation first, then the
/// others in index order; S is `!`, D is `#0` and a postconditional equation
/// is `+a;#k;#l`. A root that is S or D gives the finite program `!` or `#0`.
CanonicalProgram synthesize(const LinearSpec& spec);

/// Equality of the extracted threads (PGAu extraction on both sides).
EqualityResult behav_equiv(const CanonicalProgram& lhs, const CanonicalProgram& rhs);

/// A unit-free program with the same behavior. Unit-free input is returned
/// as is.
CanonicalProgram pgau2pga(const CanonicalProgram& program);

}  // namespace pgakit
