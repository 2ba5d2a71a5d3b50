#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace effpred::confidence {

/// Probabilities the model assigned to the tokens of its own greedy
/// prediction, one per generated token.
struct ConfidenceRecord {
  std::uint64_t example_id = 0;
  std::vector<double> token_probs;
  std::optional<std::string> predicted_text;
};

enum class Method { kAvgProb, kPerplexity };

std::string_view to_string(Method method) noexcept;
/// Accepts "avg_prob" and "ppl".
Method parse_method(std::string_view name);

struct ConfidenceScore {
  std::uint64_t example_id = 0;
  Method method = Method::kAvgProb;
  double value = 0.0;

  bool operator==(const ConfidenceScore&) const = default;
};

/// Throws a validation error unless every probability is in (0, 1] and the
/// sequence is non-empty.
void validate(const ConfidenceRecord& record);

/// Mean token probability.
ConfidenceScore conf_avg(const ConfidenceRecord& record);

/// exp of the mean negative log probability; 1 for a certain prediction.
ConfidenceScore perplexity(const ConfidenceRecord& record);

ConfidenceScore score(const ConfidenceRecord& record, Method method);
std::vector<ConfidenceScore> score_all(std::span<const ConfidenceRecord> records, Method method);

/// True when `a` is strictly less confident than `b`, with ties broken by
/// ascending example_id. Both must use the same method.
bool less_confident(const ConfidenceScore& a, const ConfidenceScore& b) noexcept;

/// Number of examples in the lowest-confidence fraction t of n: ceil(t * n),
/// at least 1 and at most n.
std::size_t segment_size(double t, std::size_t n);

struct SegmentSelection {
  double t = 1.0;
  std::uint64_t seed = 0;
  std::size_t segment_size = 0;
  /// Ids in draw order.
  std::vector<std::uint64_t> sampled_ids;
};

/// Ranks by ascending confidence, keeps the lowest ceil(t*n), then draws
/// sample_size of them without replacement. The draw is a partial
/// Fisher-Yates shuffle of the ranked segment driven by
/// std::mt19937_64(seed): for i in [0, k), j = i + uniform_below(m - i),
/// swap(segment[i], segment[j]); the first k entries are the sample.
SegmentSelection select_low_confidence(std::span<const ConfidenceScore> scores, double t,
                                       std::size_t sample_size, std::uint64_t seed);

/// The same draw applied to an already-ranked id list.
std::vector<std::uint64_t> sample_without_replacement(std::vector<std::uint64_t> ranked,
                                                      std::size_t sample_size, std::uint64_t seed);

}  // namespace effpred::confidence
