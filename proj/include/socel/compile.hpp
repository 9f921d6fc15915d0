#pragma once

#include "socel/automaton.hpp"
#include "socel/formula.hpp"

namespace socel {

enum class BinaryStrategy { Reject, ViaProduct };

struct CompileOptions {
  Semantics semantics = Semantics::Standard;
  // How AND, ALL and UNLESS are handled in standard mode.
  BinaryStrategy binary = BinaryStrategy::ViaProduct;
};

// Builds a trimmed automaton whose run semantics (standard) or *-run
// semantics (star) equals the formula's semantics. Filters must be unary
// universal extensions; star mode accepts core operators only. STRICT is
// rewritten away first. Throws Error(Unsupported) with the offending piece.
Ucea compile(const Formula& f, const CompileOptions& opts = {});

// Top-level AND, ALL or UNLESS through the product constructions.
Ucea compile_binary(const Formula& f, const CompileOptions& opts = {});

// Equivalent core formula for an AND/ALL formula over core operands:
// compile, drop empty transitions, translate back under *-runs.
// UNLESS anywhere in f is rejected.
Formula and_all_eliminate(const Formula& f, const Schema& schema);

}  // namespace socel
