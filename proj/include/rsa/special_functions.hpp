#pragma once

namespace rsa::stats {

// Regularized incomplete beta I_x(a, b). `complement` must equal 1 - x; it is
// taken separately so callers can supply it without cancellation.
double incomplete_beta(double a, double b, double x, double complement);
double incomplete_beta(double a, double b, double x);

// Upper tail P(T > t) of Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

// min(1, 2 * P(T > |t|))
double student_t_two_sided(double t, double df);

// Upper tail P(F > f) of the F distribution with (d1, d2) degrees of freedom.
double f_sf(double f, double d1, double d2);

}  // namespace rsa::stats
