#pragma once

namespace temcodec {

// Si(x) = integral of sin(u)/u from 0 to x. Odd in x.
// Power series below |x| = 6, Lentz continued fraction for E1(ix) above;
// absolute accuracy ~1e-15 over the real line.
double sine_integral(double x);

// sin(x)/x with the removable singularity evaluated by series near 0.
double sinc(double x);

}  // namespace temcodec
