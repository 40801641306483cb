#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace stablelike {

// Kolmogorov–Smirnov sup distance between the empirical law of `samples` and `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Hill estimator of the tail index from the k largest absolute values.
double hill_estimate(const std::vector<double>& samples, std::size_t k);

// Linear-interpolated empirical quantile (type 7).
double empirical_quantile(std::vector<double> values, double prob);
double median(std::vector<double> values);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Half the L1 distance between two weight vectors of equal length.
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace stablelike
