#pragma once

namespace bench::detmath {

// exp/sigmoid built from plain IEEE add/mul with a fixed evaluation order, so
// simulated transcripts are bit-identical across platforms and libm versions.
double det_exp(double x);
double sigmoid(double x);

}  // namespace bench::detmath
