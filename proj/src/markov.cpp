#include "repstruct/markov.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "repstruct/error.h"

namespace repstruct {

ContextTreeModel::ContextTreeModel(int max_order, int alphabet_size)
    : max_order_(max_order), alphabet_size_(alphabet_size) {
  if (max_order < 0) throw ParameterError("max_order must be >= 0");
  if (alphabet_size < 2 || alphabet_size > 65535) throw ParameterError("alphabet size must lie in [2, 65535]");
}

void ContextTreeModel::check_symbol(Symbol s) const {
  if (s >= alphabet_size_) {
    throw ParameterError("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(alphabet_size_));
  }
}

ContextTreeModel::Key ContextTreeModel::make_key(std::span<const Symbol> context, std::size_t length) {
  Key key(length, u'\0');
  auto tail = context.last(length);
  std::transform(tail.begin(), tail.end(), key.begin(), [](Symbol s) { return static_cast<char16_t>(s); });
  return key;
}

void ContextTreeModel::observe(std::span<const Symbol> history, Symbol symbol) {
  check_symbol(symbol);
  std::size_t longest = std::min(history.size(), static_cast<std::size_t>(max_order_));
  for (std::size_t k = 0; k <= longest; ++k) {
    for (Symbol s : history.last(k)) check_symbol(s);
    ContextStats& stats = contexts_[make_key(history, k)];
    if (stats.counts.empty()) stats.counts.assign(static_cast<std::size_t>(alphabet_size_), 0);
    if (stats.counts[symbol]++ == 0) ++stats.distinct;
    ++stats.total;
  }
}

void ContextTreeModel::forget(std::span<const Symbol> history, Symbol symbol) {
  check_symbol(symbol);
  std::size_t longest = std::min(history.size(), static_cast<std::size_t>(max_order_));
  for (std::size_t k = 0; k <= longest; ++k) {
    auto it = contexts_.find(make_key(history, k));
    if (it == contexts_.end() || it->second.counts[symbol] == 0) {
      throw ParameterError("forget() of an observation that was never made");
    }
    ContextStats& stats = it->second;
    if (--stats.counts[symbol] == 0) --stats.distinct;
    if (--stats.total == 0) contexts_.erase(it);
  }
}

void ContextTreeModel::update(std::span<const Symbol> sequence, std::span<const Symbol> history) {
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    observe(context_before(history, sequence, t, static_cast<std::size_t>(max_order_)), sequence[t]);
  }
}

void ContextTreeModel::remove(std::span<const Symbol> sequence, std::span<const Symbol> history) {
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    forget(context_before(history, sequence, t, static_cast<std::size_t>(max_order_)), sequence[t]);
  }
}

const ContextStats* ContextTreeModel::find(std::span<const Symbol> context) const {
  auto it = contexts_.find(make_key(context, context.size()));
  return it == contexts_.end() ? nullptr : &it->second;
}

std::uint64_t ContextTreeModel::observations() const {
  const ContextStats* root = find({});
  return root ? root->total : 0;
}

PredictionDistribution ContextTreeModel::predict(std::span<const Symbol> context) const {
  const auto n = static_cast<std::size_t>(alphabet_size_);
  PredictionDistribution dist{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  std::size_t longest = std::min(context.size(), static_cast<std::size_t>(max_order_));
  for (std::size_t k = 0; k <= longest; ++k) {
    auto it = contexts_.find(make_key(context, k));
    if (it == contexts_.end()) break;  // no longer suffix can be stored
    const ContextStats& stats = it->second;
    const double denom = static_cast<double>(stats.total) + static_cast<double>(stats.distinct);
    const double escape = static_cast<double>(stats.distinct) / denom;
    for (std::size_t s = 0; s < n; ++s) {
      dist.probs[s] = static_cast<double>(stats.counts[s]) / denom + escape * dist.probs[s];
    }
  }
  return dist;
}

bool operator==(const ContextTreeModel& a, const ContextTreeModel& b) {
  if (a.max_order_ != b.max_order_ || a.alphabet_size_ != b.alphabet_size_) return false;
  if (a.contexts_.size() != b.contexts_.size()) return false;
  for (const auto& [key, stats] : a.contexts_) {
    auto it = b.contexts_.find(key);
    if (it == b.contexts_.end() || it->second.counts != stats.counts) return false;
  }
  return true;
}

namespace {

constexpr const char* kModelFormat = "repstruct.context-tree";
constexpr int kModelVersion = 1;

std::string join_context(std::span<const Symbol> ctx) {
  std::string s;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(ctx[i]);
  }
  return s;
}

std::vector<Symbol> split_context(const std::string& s) {
  std::vector<Symbol> ctx;
  if (s.empty()) return ctx;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    std::string field = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size() || field.empty() || v > 65535) throw ParseError("bad context key '" + s + "'");
    ctx.push_back(static_cast<Symbol>(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return ctx;
}

}  // namespace

nlohmann::ordered_json ContextTreeModel::to_json() const {
  // Sorted keys so snapshots are byte-stable.
  std::map<std::vector<Symbol>, const ContextStats*> sorted;
  for (const auto& [key, stats] : contexts_) sorted.emplace(std::vector<Symbol>(key.begin(), key.end()), &stats);
  nlohmann::ordered_json contexts = nlohmann::ordered_json::object();
  for (const auto& [ctx, stats] : sorted) {
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (std::size_t s = 0; s < stats->counts.size(); ++s) {
      if (stats->counts[s] > 0) counts[std::to_string(s)] = stats->counts[s];
    }
    contexts[join_context(ctx)] = std::move(counts);
  }
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["max_order"] = max_order_;
  j["alphabet_size"] = alphabet_size_;
  j["contexts"] = std::move(contexts);
  return j;
}

ContextTreeModel ContextTreeModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw ParseError("not a context-tree snapshot");
    if (j.at("version").get<int>() != kModelVersion) throw ParseError("unsupported context-tree snapshot version");
    ContextTreeModel model(j.at("max_order").get<int>(), j.at("alphabet_size").get<int>());
    for (const auto& [key, counts] : j.at("contexts").items()) {
      auto ctx = split_context(key);
      if (ctx.size() > static_cast<std::size_t>(model.max_order_)) throw ParseError("context longer than max_order");
      for (Symbol s : ctx) model.check_symbol(s);
      ContextStats stats;
      stats.counts.assign(static_cast<std::size_t>(model.alphabet_size_), 0);
      for (const auto& [sym, c] : counts.items()) {
        auto parsed = split_context(sym);
        if (parsed.size() != 1) throw ParseError("bad symbol key '" + sym + "'");
        model.check_symbol(parsed[0]);
        auto value = c.get<std::uint32_t>();
        if (value == 0) continue;
        stats.counts[parsed[0]] = value;
        stats.total += value;
        ++stats.distinct;
      }
      if (stats.total > 0) model.contexts_[make_key(ctx, ctx.size())] = std::move(stats);
    }
    // Every stored context must have its shorter suffix stored.
    for (const auto& [key, stats] : model.contexts_) {
      if (!key.empty() && !model.contexts_.contains(key.substr(1))) {
        throw ParseError("snapshot context lacks its suffix context");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid context-tree snapshot: ") + e.what());
  }
}

std::vector<Symbol> context_before(std::span<const Symbol> history, std::span<const Symbol> sequence, std::size_t t,
                                   std::size_t max_len) {
  std::size_t from_seq = std::min(t, max_len);
  std::size_t from_hist = std::min(history.size(), max_len - from_seq);
  std::vector<Symbol> ctx;
  ctx.reserve(from_hist + from_seq);
  auto h = history.last(from_hist);
  ctx.insert(ctx.end(), h.begin(), h.end());
  ctx.insert(ctx.end(), sequence.begin() + static_cast<std::ptrdiff_t>(t - from_seq),
             sequence.begin() + static_cast<std::ptrdiff_t>(t));
  return ctx;
}

double entropy(const PredictionDistribution& dist) {
  double h = 0;
  for (double p : dist.probs) {
    if (p > 0) h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

Symbol argmax(const PredictionDistribution& dist) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dist.probs.size(); ++i) {
    if (dist.probs[i] > dist.probs[best]) best = i;
  }
  return static_cast<Symbol>(best);
}

double CrossEntropyResult::mean() const {
  if (per_symbol.empty()) return 0.0;
  double sum = 0;
  for (double v : per_symbol) sum += v;
  return sum / static_cast<double>(per_symbol.size());
}

CrossEntropyResult cross_entropy(ContextTreeModel& model, std::span<const Symbol> sequence,
                                 const CrossEntropyOptions& options) {
  if (!options.online) return cross_entropy(std::as_const(model), sequence, options.history);
  CrossEntropyResult r;
  r.per_symbol.reserve(sequence.size());
  const auto order = static_cast<std::size_t>(model.max_order());
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    auto ctx = context_before(options.history, sequence, t, order);
    auto dist = model.predict(ctx);
    if (sequence[t] >= dist.size()) throw ParameterError("symbol outside model alphabet");
    r.per_symbol.push_back(-std::log2(dist[sequence[t]]));
    model.observe(ctx, sequence[t]);
  }
  return r;
}

CrossEntropyResult cross_entropy(const ContextTreeModel& model, std::span<const Symbol> sequence,
                                 std::span<const Symbol> history) {
  CrossEntropyResult r;
  r.per_symbol.reserve(sequence.size());
  const auto order = static_cast<std::size_t>(model.max_order());
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    auto dist = model.predict(context_before(history, sequence, t, order));
    if (sequence[t] >= dist.size()) throw ParameterError("symbol outside model alphabet");
    r.per_symbol.push_back(-std::log2(dist[sequence[t]]));
  }
  return r;
}

double accuracy(const ContextTreeModel& model, std::span<const Symbol> sequence, std::span<const Symbol> history) {
  if (sequence.empty()) return 0.0;
  std::size_t hits = 0;
  const auto order = static_cast<std::size_t>(model.max_order());
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    if (argmax(model.predict(context_before(history, sequence, t, order))) == sequence[t]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(sequence.size());
}

PredictionDistribution mix(const PredictionDistribution& fg, const PredictionDistribution& bg, double lambda) {
  if (fg.size() != bg.size()) throw ParameterError("mixture of distributions over different alphabets");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("mixture weight must lie in [0, 1]");
  if (lambda == 1.0) return fg;
  if (lambda == 0.0) return bg;
  PredictionDistribution out{std::vector<double>(fg.size())};
  double sum = 0;
  for (std::size_t i = 0; i < fg.size(); ++i) {
    out.probs[i] = lambda * fg[i] + (1.0 - lambda) * bg[i];
    sum += out.probs[i];
  }
  for (double& p : out.probs) p /= sum;
  return out;
}

PredictionDistribution mixture_predict(const ContextTreeModel& fg, const ContextTreeModel& bg,
                                       std::span<const Symbol> context, double lambda) {
  if (fg.alphabet_size() != bg.alphabet_size()) {
    throw ParameterError("foreground and background models use different alphabets");
  }
  return mix(fg.predict(context), bg.predict(context), lambda);
}

}  // namespace repstruct
