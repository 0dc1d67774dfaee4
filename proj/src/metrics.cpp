#include "ctwalks/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ctwalks {

namespace {

void check(std::span<const double> scores, std::span<const int> labels, std::size_t& pos, std::size_t& neg) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("metrics need both positive and negative examples");
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return order;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos = 0, neg = 0;
  check(scores, labels, pos, neg);
  const auto order = order_by_score(scores, false);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1) / 2.0) / (p * static_cast<double>(neg));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos = 0, neg = 0;
  check(scores, labels, pos, neg);
  const auto order = order_by_score(scores, true);
  double ap = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t gained = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      gained += static_cast<std::size_t>(labels[order[j]]);
      ++j;
    }
    tp += gained;
    seen = j;
    if (gained) ap += static_cast<double>(gained) / static_cast<double>(pos) *
                      (static_cast<double>(tp) / static_cast<double>(seen));
    i = j;
  }
  return ap;
}

}  // namespace ctwalks
