#pragma once

#include <span>

namespace ctwalks {

/// ROC AUC as the Mann-Whitney rank statistic; tied scores share their
/// average rank. Throws when either class is missing.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Area under precision-recall: sum over distinct thresholds, in descending
/// score order, of (recall gain) * precision.
double average_precision(std::span<const double> scores, std::span<const int> labels);

}  // namespace ctwalks
