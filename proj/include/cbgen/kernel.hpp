#pragma once

#include "cbgen/params.hpp"

// Closed-form and quadrature-backed laws of the quadratic subcritical
// branching process, its excursion measure and the stationary genealogy.
// Throughout, a = 2*beta*theta and c(t) = 2*theta / (exp(a t) - 1).
namespace cbgen::kernel {

// Mechanism and its cumulant semigroup.
double branching_mechanism(const ModelParams& p, double lambda);
double cumulant(const ModelParams& p, double lambda, double t);
double extinction_rate(const ModelParams& p, double t);
double extinction_rate_inverse(const ModelParams& p, double y);
double extinction_rate_derivative(const ModelParams& p, double t);

// Time integrals of u and c.
double band_cumulant_integral(const ModelParams& p, double lambda, double t);
double tail_rate_integral(const ModelParams& p, double s);
double band_rate_integral(const ModelParams& p, double t, double s);

// Excursion measure.
double excursion_mean(const ModelParams& p, double t);
double survival_laplace(const ModelParams& p, double lambda, double t);
double extinct_weighted_mean(const ModelParams& p, double s, double t);
double extinct_weighted_mean_ratio_form(const ModelParams& p, double s, double t);

// Stationary population and time to the most recent common ancestor.
double pop_laplace(const ModelParams& p, double lambda);
double pop_mean(const ModelParams& p);
double pop_second_moment(const ModelParams& p);
double pop_autocovariance_raw(const ModelParams& p, double s);
double tmrca_cdf(const ModelParams& p, double t);
double tmrca_mean(const ModelParams& p);

// Number of ancestors at depth r of the stationary population.
double ancestors_mean(const ModelParams& p, double r);
double ancestors_second_moment(const ModelParams& p, double r);
double ancestors_laplace(const ModelParams& p, double lambda, double r);
// E[exp(-mu M_{-t} - lambda M_{-r})], r > t.
double joint_forward_laplace(const ModelParams& p, double mu, double lambda, double t,
                             double r);

// Cross moments of ancestor counts, at one time and across two times.
double cond_mean(const ModelParams& p, double t, double r, double m);
double cross_moment(const ModelParams& p, double t, double r);
// E[M_{-r} M^s_{s-q}] where M^s counts ancestors of the population at time s.
double two_time_cross_moment(const ModelParams& p, double r, double s, double q);
// The two branches, valid for s + r >= q and q >= s + r respectively.
double two_time_cross_moment_near(const ModelParams& p, double r, double s, double q);
double two_time_cross_moment_far(const ModelParams& p, double r, double s, double q);

// Counts of excursion slices. R_v^h is the number of level-v individuals
// whose descendants survive to level v + h.
double slice_laplace(const ModelParams& p, double lambda, double v, double q);
double slice_mean(const ModelParams& p, double v, double q);
double slice_mean_conditioned(const ModelParams& p, double v, double q);
double thinning_factor(const ModelParams& p, double lambda, double q, double r);
// N[(1 - exp(-lambda R_v^q)) ; extinct before v+q+s], with
// kappa = (1 - e^-lambda) c(q) + e^-lambda c(q+s).
double restricted_laplace_1(const ModelParams& p, double lambda, double v, double q,
                            double s);
// As above with an extra factor exp(-mu R_v^{q-v'}); needs 0 < v' < q.
double restricted_laplace_2(const ModelParams& p, double lambda, double mu, double v,
                            double q, double s, double vp);
// Extra factor exp(-mu R_{v-v'}^{q+v'}), a count taken v' below level v;
// needs 0 < v' < v.
double restricted_laplace_3(const ModelParams& p, double lambda, double mu, double v,
                            double q, double s, double vp);
double restricted_mean(const ModelParams& p, double v, double q, double s);

// Tree length below depth eps, raw and compensated.
double length_mean(const ModelParams& p, double eps);
// E[(L_eps - L_eta)^2 compensated], eps < eta.
double compensated_increment_second_moment(const ModelParams& p, double eps, double eta);
double compensated_second_moment(const ModelParams& p, double eps);
double compensated_truncation_error(const ModelParams& p, double eta);
double truncation_error_bound(const ModelParams& p, double eta);
double length_variance(const ModelParams& p, double eps);

// Compensated limit W0.
double phi(double lambda);
// E[exp(-a lambda W0)], lambda in [0, 1).
double w_laplace(const ModelParams& p, double lambda);
// E[exp(-a lambda W0) | Z0 = z / (2 theta)].
double w_laplace_conditional(double lambda, double z);
double w_second_moment(const ModelParams& p);
double w_covariance(const ModelParams& p, double s);
double w_increment_second_moment(const ModelParams& p, double s);

double graft_identity(const ModelParams& p, double t);

}  // namespace cbgen::kernel
