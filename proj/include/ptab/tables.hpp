#pragma once

// Answer storage: tuple tries chained into segments, the two merge
// strategies (relink vs. re-insert), and the concurrent claim sets that keep
// worker answer sets disjoint.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ptab/error.hpp"
#include "ptab/lang.hpp"

namespace ptab {

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Open-addressing map from 64-bit keys to 32-bit values, linear probing.
// The all-ones key is reserved as the empty marker.
class FlatU64Map {
 public:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};

  FlatU64Map() { rehash(16); }

  const std::uint32_t* find(std::uint64_t key) const noexcept {
    std::size_t i = mix64(key) & mask_;
    for (;;) {
      const auto& s = slots_[i];
      if (s.key == key) return &s.value;
      if (s.key == kEmpty) return nullptr;
      i = (i + 1) & mask_;
    }
  }

  // Returns the slot value and whether it was inserted.
  std::pair<std::uint32_t, bool> try_emplace(std::uint64_t key, std::uint32_t value) {
    if ((size_ + 1) * 2 > slots_.size()) rehash(slots_.size() * 2);
    std::size_t i = mix64(key) & mask_;
    for (;;) {
      auto& s = slots_[i];
      if (s.key == key) return {s.value, false};
      if (s.key == kEmpty) {
        s.key = key;
        s.value = value;
        ++size_;
        return {value, true};
      }
      i = (i + 1) & mask_;
    }
  }

  std::size_t size() const noexcept { return size_; }

  void reserve(std::size_t n) {
    std::size_t cap = slots_.size();
    while (cap < n * 2) cap *= 2;
    if (cap != slots_.size()) rehash(cap);
  }

 private:
  struct Slot {
    std::uint64_t key = kEmpty;
    std::uint32_t value = 0;
  };

  void rehash(std::size_t capacity) {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(capacity, Slot{});
    mask_ = capacity - 1;
    size_ = 0;
    for (const auto& s : old)
      if (s.key != kEmpty) try_emplace(s.key, s.value);
  }

  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

}  // namespace detail

/// Trie over interned constants with depth == arity. Remembers first-insertion
/// order, which is also its iteration order.
class AnswerTrie {
 public:
  explicit AnswerTrie(std::uint32_t arity) : arity_(arity) {
    if (arity == 0) throw ArityError("answer trie arity must be >= 1");
  }

  std::uint32_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return log_.size() / arity_; }
  bool empty() const noexcept { return log_.empty(); }

  /// Returns true if the tuple was not present before.
  bool insert(std::span<const ConstId> tuple) {
    check_arity(tuple);
    std::uint32_t node = 0;
    for (std::uint32_t level = 0; level + 1 < arity_; ++level) {
      auto [child, fresh] = edges_.try_emplace(edge_key(node, tuple[level]), next_node_);
      if (fresh) ++next_node_;
      node = child;
    }
    const auto row = static_cast<std::uint32_t>(size());
    if (!edges_.try_emplace(edge_key(node, tuple[arity_ - 1]), row).second) return false;
    log_.insert(log_.end(), tuple.begin(), tuple.end());
    return true;
  }

  bool contains(std::span<const ConstId> tuple) const {
    check_arity(tuple);
    std::uint32_t node = 0;
    for (std::uint32_t level = 0; level < arity_; ++level) {
      const auto* next = edges_.find(edge_key(node, tuple[level]));
      if (!next) return false;
      node = *next;
    }
    return true;
  }

  /// i-th tuple in insertion order.
  std::span<const ConstId> row(std::size_t i) const { return {log_.data() + i * arity_, arity_}; }

  void reserve(std::size_t tuples) {
    log_.reserve(tuples * arity_);
    edges_.reserve(tuples * arity_);
  }

 private:
  static std::uint64_t edge_key(std::uint32_t node, ConstId c) noexcept {
    return (std::uint64_t{node} << 32) | index_of(c);
  }

  void check_arity(std::span<const ConstId> tuple) const {
    if (tuple.size() != arity_)
      throw ArityError("tuple of arity " + std::to_string(tuple.size()) + " for table of arity " + std::to_string(arity_));
  }

  std::uint32_t arity_;
  std::uint32_t next_node_ = 1;  // 0 is the root
  detail::FlatU64Map edges_;
  std::vector<ConstId> log_;
};

enum class TableState { Open, Sealed, Consumed };
enum class InsertResult { Inserted, Duplicate };

inline const char* to_string(TableState s) {
  switch (s) {
    case TableState::Open: return "open";
    case TableState::Sealed: return "sealed";
    case TableState::Consumed: return "consumed";
  }
  return "?";
}

class AnswerTable;
void merge_link(AnswerTable& parent, AnswerTable& child);
void merge_copy(AnswerTable& parent, AnswerTable& child);

/// Answer table as a singly linked chain of trie segments. Only the first
/// segment is writable; merging appends a child's chain at the tail.
class AnswerTable {
 public:
  struct Segment {
    explicit Segment(std::uint32_t arity) : trie(arity) {}
    AnswerTrie trie;
    std::unique_ptr<Segment> next;
  };

  explicit AnswerTable(std::uint32_t arity)
      : arity_(arity), head_(std::make_unique<Segment>(arity)), tail_(head_.get()) {}

  AnswerTable(AnswerTable&& other) noexcept
      : arity_(other.arity_),
        state_(other.state_),
        head_(std::move(other.head_)),
        tail_(std::exchange(other.tail_, nullptr)),
        count_(std::exchange(other.count_, 0)) {
    other.state_ = TableState::Consumed;
  }

  AnswerTable& operator=(AnswerTable&& other) noexcept {
    if (this != &other) {
      arity_ = other.arity_;
      state_ = other.state_;
      head_ = std::move(other.head_);
      tail_ = std::exchange(other.tail_, nullptr);
      count_ = std::exchange(other.count_, 0);
      other.state_ = TableState::Consumed;
    }
    return *this;
  }

  AnswerTable(const AnswerTable&) = delete;
  AnswerTable& operator=(const AnswerTable&) = delete;

  ~AnswerTable() {
    // Unlink iteratively so long chains do not recurse.
    while (head_) head_ = std::move(head_->next);
  }

  std::uint32_t arity() const noexcept { return arity_; }
  TableState state() const noexcept { return state_; }

  /// Sum of segment counts. Equals the distinct count when segments are disjoint.
  std::size_t size() const noexcept { return count_; }

  std::size_t segment_count() const noexcept {
    std::size_t n = 0;
    for (auto* s = head_.get(); s; s = s->next.get()) ++n;
    return n;
  }

  std::vector<const Segment*> segments() const {
    std::vector<const Segment*> out;
    for (auto* s = head_.get(); s; s = s->next.get()) out.push_back(s);
    return out;
  }

  InsertResult insert(std::span<const ConstId> tuple) {
    if (state_ != TableState::Open) throw StateError(std::string("insert into ") + to_string(state_) + " table");
    return insert_unchecked(tuple);
  }

  InsertResult insert(std::initializer_list<ConstId> tuple) { return insert(std::span<const ConstId>(tuple.begin(), tuple.size())); }

  bool contains(std::span<const ConstId> tuple) const {
    require_live("contains");
    for (auto* s = head_.get(); s; s = s->next.get())
      if (s->trie.contains(tuple)) return true;
    return false;
  }

  void seal() {
    require_live("seal");
    state_ = TableState::Sealed;
  }

  /// Visits segments in chain order and tuples in per-segment insertion
  /// order. With `dedup`, a tuple already present in an earlier segment is
  /// skipped.
  template <class F>
  void for_each(F&& f, bool dedup = false) const {
    require_live("iterate");
    for (auto* s = head_.get(); s; s = s->next.get()) {
      const auto n = s->trie.size();
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = s->trie.row(i);
        if (dedup && seen_before(s, row)) continue;
        f(row);
      }
    }
  }

  std::vector<Tuple> collect(bool dedup = false) const {
    std::vector<Tuple> out;
    for_each([&](std::span<const ConstId> row) { out.emplace_back(row.begin(), row.end()); }, dedup);
    return out;
  }

  /// Number of tuples iteration would yield with dedup on.
  std::size_t distinct_size() const {
    std::size_t n = 0;
    for_each([&](std::span<const ConstId>) { ++n; }, true);
    return n;
  }

  void reserve(std::size_t tuples) { head_->trie.reserve(tuples); }

  /// The writable segment.
  const AnswerTrie& first_segment() const {
    require_live("access");
    return head_->trie;
  }

 private:
  friend void merge_link(AnswerTable& parent, AnswerTable& child);
  friend void merge_copy(AnswerTable& parent, AnswerTable& child);

  InsertResult insert_unchecked(std::span<const ConstId> tuple) {
    if (tuple.size() != arity_)
      throw ArityError("tuple of arity " + std::to_string(tuple.size()) + " for table of arity " + std::to_string(arity_));
    for (auto* s = head_->next.get(); s; s = s->next.get())
      if (s->trie.contains(tuple)) return InsertResult::Duplicate;
    if (!head_->trie.insert(tuple)) return InsertResult::Duplicate;
    ++count_;
    return InsertResult::Inserted;
  }

  bool seen_before(const Segment* upto, std::span<const ConstId> row) const {
    for (auto* s = head_.get(); s != upto; s = s->next.get())
      if (s->trie.contains(row)) return true;
    return false;
  }

  void require_live(const char* op) const {
    if (state_ == TableState::Consumed || !head_) throw StateError(std::string(op) + " on consumed table");
  }

  static void check_merge(const AnswerTable& parent, const AnswerTable& child) {
    if (&parent == &child) throw StateError("cannot merge a table into itself");
    if (parent.state_ == TableState::Consumed) throw StateError("merge into consumed table");
    if (child.state_ == TableState::Consumed) throw StateError("merge of consumed table");
    if (child.state_ != TableState::Sealed) throw StateError("child table must be sealed before merging");
    if (parent.arity_ != child.arity_)
      throw ArityError("merge of arity " + std::to_string(child.arity_) + " table into arity " + std::to_string(parent.arity_));
  }

  std::uint32_t arity_;
  TableState state_ = TableState::Open;
  std::unique_ptr<Segment> head_;
  Segment* tail_;
  std::size_t count_ = 0;
};

/// Appends the child's segment chain to the parent's by relinking the chain
/// ends. No tuple is touched. The child must hold no tuple the parent holds.
inline void merge_link(AnswerTable& parent, AnswerTable& child) {
  AnswerTable::check_merge(parent, child);
  parent.tail_->next = std::move(child.head_);
  parent.tail_ = child.tail_;
  parent.count_ += child.count_;
  child.tail_ = nullptr;
  child.count_ = 0;
  child.state_ = TableState::Consumed;
}

/// Re-inserts every child tuple into the parent's writable segment.
inline void merge_copy(AnswerTable& parent, AnswerTable& child) {
  AnswerTable::check_merge(parent, child);
  for (auto* s = child.head_.get(); s; s = s->next.get()) {
    const auto n = s->trie.size();
    for (std::size_t i = 0; i < n; ++i) parent.insert_unchecked(s->trie.row(i));
  }
  while (child.head_) child.head_ = std::move(child.head_->next);
  child.tail_ = nullptr;
  child.count_ = 0;
  child.state_ = TableState::Consumed;
}

enum class MergeStrategy { Link, Copy };

inline void merge(AnswerTable& parent, AnswerTable& child, MergeStrategy strategy) {
  if (strategy == MergeStrategy::Link)
    merge_link(parent, child);
  else
    merge_copy(parent, child);
}

// ---------------------------------------------------------------------------
// Claim sets

enum class ClaimResult { Claimed, AlreadyClaimed };

using ClaimKey = std::uint64_t;

/// Fingerprint of a ground subgoal (predicate plus argument constants).
/// Distinct subgoals collide with probability ~2^-64 per pair.
inline ClaimKey subgoal_key(PredId pred, std::span<const ConstId> args) noexcept {
  std::uint64_t h = detail::mix64(index_of(pred));
  for (auto c : args) h = detail::mix64(h ^ index_of(c));
  return h;
}

/// Concurrent set with linearizable first-claim semantics over arbitrary
/// 64-bit keys, sharded by key hash.
class ClaimSet {
 public:
  static constexpr std::size_t kDefaultShards = 64;

  explicit ClaimSet(std::size_t shards = kDefaultShards)
      : shard_count_(shards ? shards : 1), shards_(std::make_unique<Shard[]>(shard_count_)) {}

  ClaimResult try_claim(ClaimKey key) {
    auto& s = shard(key);
    std::lock_guard lock(s.mutex);
    return s.keys.insert(key).second ? ClaimResult::Claimed : ClaimResult::AlreadyClaimed;
  }

  ClaimResult try_claim(ConstId c) { return try_claim(ClaimKey{index_of(c)}); }

  bool is_claimed(ClaimKey key) const {
    auto& s = shard(key);
    std::lock_guard lock(s.mutex);
    return s.keys.count(key) != 0;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < shard_count_; ++i) {
      std::lock_guard lock(shards_[i].mutex);
      n += shards_[i].keys.size();
    }
    return n;
  }

  std::size_t shard_count() const noexcept { return shard_count_; }

 private:
  struct alignas(64) Shard {
    mutable std::mutex mutex;
    std::unordered_set<ClaimKey> keys;
  };

  Shard& shard(ClaimKey key) const { return shards_[detail::mix64(key) % shard_count_]; }

  std::size_t shard_count_;
  std::unique_ptr<Shard[]> shards_;
};

/// Claim set over the dense constant id range [0, universe): one atomic flag
/// per constant. Same contract as ClaimSet, no locks.
class DenseClaimSet {
 public:
  explicit DenseClaimSet(std::size_t universe)
      : universe_(universe), flags_(std::make_unique<std::atomic<std::uint8_t>[]>(universe)) {
    for (std::size_t i = 0; i < universe; ++i) flags_[i].store(0, std::memory_order_relaxed);
  }

  ClaimResult try_claim(ConstId c) noexcept {
    auto& f = flags_[index_of(c)];
    if (f.load(std::memory_order_relaxed) != 0) return ClaimResult::AlreadyClaimed;
    return f.exchange(1, std::memory_order_acq_rel) == 0 ? ClaimResult::Claimed : ClaimResult::AlreadyClaimed;
  }

  bool is_claimed(ConstId c) const noexcept { return flags_[index_of(c)].load(std::memory_order_acquire) != 0; }

  std::size_t universe() const noexcept { return universe_; }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < universe_; ++i) n += flags_[i].load(std::memory_order_relaxed) != 0;
    return n;
  }

 private:
  std::size_t universe_;
  std::unique_ptr<std::atomic<std::uint8_t>[]> flags_;
};

}  // namespace ptab
