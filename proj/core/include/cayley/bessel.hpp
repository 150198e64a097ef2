#pragma once

namespace cayley {

// Modified Bessel function of the first kind, integer order.
// Power series below |x| = 15, Miller downward recurrence with
// renormalization above. I(-n, x) == I(n, x); for x < 0 the integer-order
// parity I(n, -x) == (-1)^n I(n, x) applies.
double bessel_i(int order, double x);

// exp(-|x|) * bessel_i(order, x); safe against overflow for large |x|.
double bessel_i_scaled(int order, double x);

}  // namespace cayley
