#pragma once

#include "socel/formula.hpp"

namespace socel {

// Replaces every occurrence of label `from` by `to`; a relation atom named
// `from` becomes `from[from->to]`. Meant for fresh `to`.
Formula substitute_label(const Formula& f, Label from, Label to);

// True when every complex event of f has a gap-free support.
bool produces_intervals(const Formula& f);

// Removes STRICT by pushing it down to atoms; sequencing becomes ':' and
// iteration becomes '(+)'. Throws Error(Unsupported) for PROJECT or ALL
// under STRICT.
Formula strict_to_contiguous(const Formula& f);

// Moves every IN down to single-event subformulas (atoms under IN, rename and
// filter). IN stays above PROJECT, AND and ALL.
Formula push_labels_down(const Formula& f);

// Removes ':' using STRICT. Throws Error(Unsupported) on '(+)' and on ':'
// operands containing PROJECT, AND, ALL or UNLESS.
Formula contiguous_seq_to_strict(const Formula& f);

// Removes '(+)' and ':' for formulas whose filters are all unary universal
// extensions. Throws Error(Unsupported) otherwise.
Formula unary_strictplus_eliminate(const Formula& f);

}  // namespace socel
