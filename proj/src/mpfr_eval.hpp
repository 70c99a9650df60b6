#pragma once

// Arbitrary-precision evaluations of the inversion formula (MPFR).

#include "dnet/net.hpp"
#include "dnet/wafom.hpp"

namespace dnet::detail {

// Precision that resolves any nonzero W^2 of this net to far better than
// double precision: the smallest possible dual term b^(-2 sum max(nu, 0)) is
// a lower bound on a nonzero W^2, and the per-point products are bounded by
// prod (1 + (b-1) b^(-2 nu)).
long safe_precision_bits(const DigitalNet& net, const WeightSpec& spec);

// Excess recurrence p <- p + x + p x per point, summed, divided by |P|.
double inversion_radicand_mpfr(const DigitalNet& net, const WeightSpec& spec, long bits);

// mean_B prod (1 + eta b^(-2 nu)) - 1, formed directly.
double direct_radicand_mpfr(const DigitalNet& net, const WeightSpec& spec, long bits);

}  // namespace dnet::detail
