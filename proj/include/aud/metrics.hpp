#pragma once

#include <vector>

namespace aud {

struct ConfusionCounts {
  int tp = 0;
  int fn = 0;
  int tn = 0;
  int fp = 0;
  int k_true = 0;
  int n_total = 0;
};

// Set-intersection counts between the true and detected active sets.
// true_set must be non-empty (the true-positive rate is undefined otherwise).
ConfusionCounts confusion(const std::vector<int>& true_set, const std::vector<int>& detected_set,
                          int n_total);

// 1 - (TPR + TNR)/2 with TPR = tp/k_true, TNR = tn/(n_total - k_true).
double one_minus_balanced_accuracy(const ConfusionCounts& counts);

}  // namespace aud
