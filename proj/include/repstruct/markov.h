// Variable-order Markov prediction over discrete symbols: per-context counts
// for every order up to a maximum, blended by PPM-C escape probabilities.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "repstruct/types.h"

namespace repstruct {

/// Probabilities over the whole alphabet. Always sums to 1 with full support.
struct PredictionDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

struct ContextStats {
  std::vector<std::uint32_t> counts;
  std::uint32_t total = 0;
  std::uint32_t distinct = 0;
};

class ContextTreeModel {
 public:
  ContextTreeModel(int max_order, int alphabet_size);

  int max_order() const { return max_order_; }
  int alphabet_size() const { return alphabet_size_; }

  /// Counts `symbol` under every suffix (length 0..max_order) of `history`,
  /// whose last element is the most recent symbol.
  void observe(std::span<const Symbol> history, Symbol symbol);
  /// Exact inverse of observe(). Contexts whose total drops to zero are erased.
  void forget(std::span<const Symbol> history, Symbol symbol);

  /// Observes each symbol of `sequence` with the running context, seeded by
  /// `history` (symbols preceding the sequence).
  void update(std::span<const Symbol> sequence, std::span<const Symbol> history = {});
  void remove(std::span<const Symbol> sequence, std::span<const Symbol> history = {});

  /// Blends from the empty context up to the longest stored suffix of
  /// `context`: at each level P = c(s)/(T+d) + d/(T+d) * P_shorter, starting
  /// from the uniform distribution. No exclusion is applied.
  PredictionDistribution predict(std::span<const Symbol> context) const;

  /// Stats for an exact context (most recent symbol last), or null.
  const ContextStats* find(std::span<const Symbol> context) const;
  std::size_t context_count() const { return contexts_.size(); }
  /// Symbols observed so far (the empty context's total).
  std::uint64_t observations() const;

  /// Visits every stored context as (symbols, stats).
  template <typename Fn>
  void for_each_context(Fn&& fn) const {
    for (const auto& [key, stats] : contexts_) {
      std::vector<Symbol> ctx(key.begin(), key.end());
      fn(std::span<const Symbol>(ctx), stats);
    }
  }

  /// Versioned snapshot: {"format", "version", "max_order", "alphabet_size",
  /// "contexts": {"3,4": {"7": 2}}}; keys are comma-joined, oldest first.
  nlohmann::ordered_json to_json() const;
  static ContextTreeModel from_json(const nlohmann::json& j);

  friend bool operator==(const ContextTreeModel& a, const ContextTreeModel& b);

 private:
  using Key = std::u16string;

  void check_symbol(Symbol s) const;
  static Key make_key(std::span<const Symbol> context, std::size_t length);

  int max_order_;
  int alphabet_size_;
  std::unordered_map<Key, ContextStats> contexts_;
};

/// Shannon entropy in bits.
double entropy(const PredictionDistribution& dist);

/// Most probable symbol; ties go to the lowest index.
Symbol argmax(const PredictionDistribution& dist);

struct CrossEntropyOptions {
  bool online = false;              // update the model after each prediction
  std::span<const Symbol> history;  // context preceding the first symbol
};

struct CrossEntropyResult {
  std::vector<double> per_symbol;  // -log2 P(s_t | context)
  double mean() const;
};

/// With `options.online` the model is updated after each prediction.
CrossEntropyResult cross_entropy(ContextTreeModel& model, std::span<const Symbol> sequence,
                                 const CrossEntropyOptions& options = {});
/// Read-only evaluation (never updates).
CrossEntropyResult cross_entropy(const ContextTreeModel& model, std::span<const Symbol> sequence,
                                 std::span<const Symbol> history = {});

/// Fraction of positions where argmax(predict) equals the observed symbol.
double accuracy(const ContextTreeModel& model, std::span<const Symbol> sequence,
                std::span<const Symbol> history = {});

/// lambda * fg + (1 - lambda) * bg.
PredictionDistribution mix(const PredictionDistribution& fg, const PredictionDistribution& bg, double lambda);
PredictionDistribution mixture_predict(const ContextTreeModel& fg, const ContextTreeModel& bg,
                                       std::span<const Symbol> context, double lambda);

/// Context window for position `t` of `sequence` given preceding `history`:
/// the last `max_len` symbols before t, concatenated across the two.
std::vector<Symbol> context_before(std::span<const Symbol> history, std::span<const Symbol> sequence, std::size_t t,
                                   std::size_t max_len);

}  // namespace repstruct
