#pragma once

#include <iosfwd>

namespace signal_lab {

// Self-check suite behind `signal-lab verify`: algebraic identities,
// brute-force equivalences, zero-mean and known-variance checks. Prints one
// line per check; returns the number of failures. quick shrinks instance
// counts and Monte-Carlo sizes.
int run_verification(bool quick, std::ostream& out);

}  // namespace signal_lab
