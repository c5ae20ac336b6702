#ifndef HHC_STATS_HPP
#define HHC_STATS_HPP

#include <vector>

namespace hhc {

// chi^2 survival function P(X >= x) with k degrees of freedom
double chi2_sf(double x, int df);

// two-sided normal p-value for a z statistic
double normal_two_sided_p(double z);

// Student t survival-based two-sided p
double student_t_two_sided_p(double t, double df);

double normal_pdf(double x);

// type-7 (linear interpolation) quantile of unsorted data, q in [0,1]
double quantile_type7(std::vector<double> values, double q);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

} // namespace hhc

#endif
