#pragma once

#include <optional>
#include <span>
#include <vector>

namespace effpred::stats {

/// Median; even counts average the two middle values. Throws a validation
/// error on empty input.
double median(std::span<const double> values);

double mean(std::span<const double> values);

/// Fractional ranks starting at 1; ties get the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (Pearson over average ranks).
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double students_t_two_sided_p(double t, double dof);

}  // namespace effpred::stats
