#pragma once

namespace heave::stats {

// Standard normal quantile, |error| < 1e-15 over (0,1). Throws
// ValidationError on q <= 0 or q >= 1. Exactly antisymmetric around 0.5
// for (q, 1-q) pairs that are exact complements in double precision.
double normal_quantile(double q);

// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace heave::stats
