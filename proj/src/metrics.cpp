#include "aud/metrics.hpp"

#include <stdexcept>
#include <vector>

namespace aud {

ConfusionCounts confusion(const std::vector<int>& true_set, const std::vector<int>& detected_set,
                          int n_total) {
  if (true_set.empty()) {
    throw std::invalid_argument("confusion: true active set is empty, TPR undefined");
  }
  std::vector<char> is_true(n_total, 0);
  std::vector<char> is_detected(n_total, 0);
  for (int n : true_set) {
    if (n < 0 || n >= n_total) {
      throw std::invalid_argument("confusion: true-set index out of range");
    }
    is_true[n] = 1;
  }
  for (int n : detected_set) {
    if (n < 0 || n >= n_total) {
      throw std::invalid_argument("confusion: detected-set index out of range");
    }
    is_detected[n] = 1;
  }
  ConfusionCounts counts;
  counts.n_total = n_total;
  for (int n = 0; n < n_total; ++n) {
    if (is_true[n]) {
      ++counts.k_true;
      is_detected[n] ? ++counts.tp : ++counts.fn;
    } else {
      is_detected[n] ? ++counts.fp : ++counts.tn;
    }
  }
  return counts;
}

double one_minus_balanced_accuracy(const ConfusionCounts& counts) {
  if (counts.k_true < 1) {
    throw std::invalid_argument("one_minus_balanced_accuracy: k_true must be >= 1");
  }
  if (counts.n_total <= counts.k_true) {
    throw std::invalid_argument("one_minus_balanced_accuracy: requires n_total > k_true");
  }
  const double tpr = static_cast<double>(counts.tp) / counts.k_true;
  const double tnr = static_cast<double>(counts.tn) / (counts.n_total - counts.k_true);
  return 1.0 - 0.5 * (tpr + tnr);
}

}  // namespace aud
