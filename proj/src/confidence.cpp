#include "effpred/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "effpred/error.hpp"
#include "effpred/rng.hpp"

namespace effpred::confidence {
namespace {

std::string id_context(std::uint64_t id) { return "example_id=" + std::to_string(id); }

}  // namespace

std::string_view to_string(Method method) noexcept {
  return method == Method::kAvgProb ? "avg_prob" : "ppl";
}

Method parse_method(std::string_view name) {
  if (name == "avg_prob") return Method::kAvgProb;
  if (name == "ppl") return Method::kPerplexity;
  fail(ErrorCode::kValidation, "unknown confidence method '" + std::string(name) + "'");
}

void validate(const ConfidenceRecord& record) {
  if (record.token_probs.empty())
    fail(ErrorCode::kValidation, "empty token_probs", id_context(record.example_id));
  for (const double p : record.token_probs) {
    if (!(p > 0.0 && p <= 1.0))
      fail(ErrorCode::kValidation, "token probability outside (0, 1]: " + std::to_string(p),
           id_context(record.example_id));
  }
}

ConfidenceScore conf_avg(const ConfidenceRecord& record) {
  validate(record);
  double sum = 0.0;
  for (const double p : record.token_probs) sum += p;
  const double value = sum / static_cast<double>(record.token_probs.size());
  return {record.example_id, Method::kAvgProb, std::min(value, 1.0)};
}

ConfidenceScore perplexity(const ConfidenceRecord& record) {
  validate(record);
  if (record.token_probs.size() == 1)
    return {record.example_id, Method::kPerplexity, 1.0 / record.token_probs.front()};
  double nll = 0.0;
  for (const double p : record.token_probs) nll -= std::log(p);
  const double value = std::exp(nll / static_cast<double>(record.token_probs.size()));
  return {record.example_id, Method::kPerplexity, std::max(value, 1.0)};
}

ConfidenceScore score(const ConfidenceRecord& record, Method method) {
  return method == Method::kAvgProb ? conf_avg(record) : perplexity(record);
}

std::vector<ConfidenceScore> score_all(std::span<const ConfidenceRecord> records, Method method) {
  std::vector<ConfidenceScore> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(score(r, method));
  return out;
}

bool less_confident(const ConfidenceScore& a, const ConfidenceScore& b) noexcept {
  // High perplexity means low confidence, so ppl ranks in descending order.
  if (a.value != b.value)
    return a.method == Method::kAvgProb ? a.value < b.value : a.value > b.value;
  return a.example_id < b.example_id;
}

std::size_t segment_size(double t, std::size_t n) {
  if (!(t > 0.0 && t <= 1.0)) fail(ErrorCode::kValidation, "segment fraction t must be in (0, 1]");
  if (n == 0) return 0;
  const double raw = t * static_cast<double>(n);
  // t is usually a decimal fraction like 0.1 that binary floating point
  // cannot hold exactly; absorb representation noise before the ceiling.
  auto size = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(size, 1, n);
}

std::vector<std::uint64_t> sample_without_replacement(std::vector<std::uint64_t> ranked,
                                                      std::size_t sample_size, std::uint64_t seed) {
  if (sample_size > ranked.size())
    fail(ErrorCode::kCapacity, "sample_size " + std::to_string(sample_size) +
                                   " exceeds segment size " + std::to_string(ranked.size()));
  std::mt19937_64 rng(seed);
  const std::size_t m = ranked.size();
  for (std::size_t i = 0; i < sample_size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, m - i));
    std::swap(ranked[i], ranked[j]);
  }
  ranked.resize(sample_size);
  return ranked;
}

SegmentSelection select_low_confidence(std::span<const ConfidenceScore> scores, double t,
                                       std::size_t sample_size, std::uint64_t seed) {
  if (sample_size == 0) fail(ErrorCode::kValidation, "sample_size must be positive");
  if (scores.empty()) fail(ErrorCode::kValidation, "no confidence scores to select from");
  const Method method = scores.front().method;
  std::unordered_set<std::uint64_t> ids;
  for (const auto& s : scores) {
    if (s.method != method)
      fail(ErrorCode::kValidation, "confidence scores mix methods", id_context(s.example_id));
    if (!std::isfinite(s.value))
      fail(ErrorCode::kValidation, "non-finite confidence score", id_context(s.example_id));
    if (!ids.insert(s.example_id).second)
      fail(ErrorCode::kValidation, "duplicate example_id in scores", id_context(s.example_id));
  }

  std::vector<ConfidenceScore> ranked(scores.begin(), scores.end());
  std::sort(ranked.begin(), ranked.end(), less_confident);

  SegmentSelection selection;
  selection.t = t;
  selection.seed = seed;
  selection.segment_size = segment_size(t, ranked.size());
  if (sample_size > selection.segment_size)
    fail(ErrorCode::kCapacity, "sample_size " + std::to_string(sample_size) +
                                   " exceeds low-confidence segment size " +
                                   std::to_string(selection.segment_size));
  std::vector<std::uint64_t> segment;
  segment.reserve(selection.segment_size);
  for (std::size_t i = 0; i < selection.segment_size; ++i) segment.push_back(ranked[i].example_id);
  selection.sampled_ids = sample_without_replacement(std::move(segment), sample_size, seed);
  return selection;
}

}  // namespace effpred::confidence
