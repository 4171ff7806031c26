#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "ptab/tables.hpp"

using namespace ptab;

namespace {

ConstId c(std::uint32_t i) { return ConstId{i}; }

std::multiset<Tuple> as_multiset(const std::vector<Tuple>& v) { return {v.begin(), v.end()}; }

AnswerTable sealed(std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> rows) {
  AnswerTable t(2);
  for (auto [a, b] : rows) t.insert({c(a), c(b)});
  t.seal();
  return t;
}

}  // namespace

TEST(Trie, InsertContainsOrder) {
  AnswerTrie t(3);
  EXPECT_TRUE(t.insert(std::vector{c(1), c(2), c(3)}));
  EXPECT_TRUE(t.insert(std::vector{c(1), c(2), c(4)}));
  EXPECT_TRUE(t.insert(std::vector{c(0), c(2), c(3)}));
  EXPECT_FALSE(t.insert(std::vector{c(1), c(2), c(3)}));
  EXPECT_EQ(t.size(), 3u);
  EXPECT_TRUE(t.contains(std::vector{c(1), c(2), c(4)}));
  EXPECT_FALSE(t.contains(std::vector{c(1), c(2), c(5)}));
  EXPECT_FALSE(t.contains(std::vector{c(2), c(2), c(3)}));
  EXPECT_EQ(Tuple(t.row(2).begin(), t.row(2).end()), (Tuple{c(0), c(2), c(3)}));
}

TEST(Table, InsertAndDuplicate) {
  AnswerTable t(2);
  EXPECT_EQ(t.insert({c(0), c(1)}), InsertResult::Inserted);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.insert({c(0), c(1)}), InsertResult::Duplicate);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.contains(Tuple{c(0), c(1)}));
}

TEST(Table, ThousandTuplesAgainstReferenceSet) {
  std::mt19937_64 rng(7);
  AnswerTable t(2);
  std::set<Tuple> ref;
  std::vector<Tuple> order;
  while (ref.size() < 1000) {
    Tuple tu{c(static_cast<std::uint32_t>(rng() % 64)), c(static_cast<std::uint32_t>(rng() % 64))};
    const bool fresh = ref.insert(tu).second;
    if (fresh) order.push_back(tu);
    ASSERT_EQ(t.insert(tu), fresh ? InsertResult::Inserted : InsertResult::Duplicate);
  }
  EXPECT_EQ(t.size(), 1000u);
  EXPECT_EQ(t.collect(), order);  // first-insertion order, each once
}

TEST(Table, StateErrors) {
  AnswerTable t(2);
  EXPECT_THROW(t.insert({c(1)}), ArityError);
  t.insert({c(0), c(1)});
  t.seal();
  EXPECT_EQ(t.state(), TableState::Sealed);
  EXPECT_THROW(t.insert({c(0), c(2)}), StateError);
  EXPECT_TRUE(t.contains(Tuple{c(0), c(1)}));

  AnswerTable parent(2);
  merge_link(parent, t);
  EXPECT_EQ(t.state(), TableState::Consumed);
  EXPECT_THROW(t.collect(), StateError);
  EXPECT_THROW(t.contains(Tuple{c(0), c(1)}), StateError);
  EXPECT_THROW(merge_link(parent, t), StateError);
  EXPECT_THROW(merge_copy(parent, t), StateError);
}

TEST(Table, MergePreconditions) {
  AnswerTable a(2), open(2);
  open.insert({c(1), c(2)});
  EXPECT_THROW(merge_link(a, open), StateError);  // child must be sealed
  a.seal();
  EXPECT_THROW(merge_link(a, a), StateError);
  AnswerTable parent(2);
  auto wide = AnswerTable(3);
  wide.seal();
  EXPECT_THROW(merge_copy(parent, wide), ArityError);
}

TEST(Merge, SingleChild) {
  for (auto strategy : {MergeStrategy::Link, MergeStrategy::Copy}) {
    AnswerTable parent(2);
    parent.insert({c(0), c(1)});
    auto child = sealed({{0, 2}});
    merge(parent, child, strategy);
    EXPECT_EQ(parent.size(), 2u);
    EXPECT_EQ(parent.collect(), (std::vector<Tuple>{{c(0), c(1)}, {c(0), c(2)}}));
    EXPECT_EQ(child.state(), TableState::Consumed);
  }
}

TEST(Merge, Empty) {
  for (auto strategy : {MergeStrategy::Link, MergeStrategy::Copy}) {
    AnswerTable parent(2);
    auto child = sealed({});
    merge(parent, child, strategy);
    EXPECT_EQ(parent.size(), 0u);
    EXPECT_TRUE(parent.collect().empty());
  }
}

TEST(Merge, FourChildrenEqualUnion) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 20; ++round) {
    std::set<Tuple> expect;
    std::vector<std::vector<Tuple>> parts(5);
    std::uint32_t next = 0;
    for (auto& part : parts)
      for (std::size_t i = 0, n = rng() % 50; i < n; ++i) {
        Tuple t{c(0), c(next++)};
        part.push_back(t);
        expect.insert(t);
      }
    std::set<Tuple> results[2];
    for (auto strategy : {MergeStrategy::Link, MergeStrategy::Copy}) {
      AnswerTable parent(2);
      for (const auto& t : parts[0]) parent.insert(t);
      std::size_t total = parts[0].size();
      for (std::size_t k = 1; k < parts.size(); ++k) {
        AnswerTable child(2);
        for (const auto& t : parts[k]) child.insert(t);
        child.seal();
        merge(parent, child, strategy);
        total += parts[k].size();
        ASSERT_EQ(parent.size(), total);
      }
      const auto got = parent.collect();
      ASSERT_EQ(got.size(), expect.size());
      results[strategy == MergeStrategy::Copy] = std::set<Tuple>(got.begin(), got.end());
      EXPECT_EQ(parent.segment_count(), strategy == MergeStrategy::Link ? 5u : 1u);
    }
    EXPECT_EQ(results[0], expect);
    EXPECT_EQ(results[1], expect);
  }
}

TEST(Iterate, ParentSegmentFirst) {
  AnswerTable parent(2);
  parent.insert({c(0), c(1)});
  parent.insert({c(0), c(2)});
  auto child = sealed({{0, 3}, {0, 4}, {0, 5}});
  merge_link(parent, child);
  EXPECT_EQ(parent.collect(), (std::vector<Tuple>{{c(0), c(1)}, {c(0), c(2)}, {c(0), c(3)}, {c(0), c(4)}, {c(0), c(5)}}));
}

TEST(Iterate, DedupSuppressesEarlierSegments) {
  AnswerTable parent(2);
  parent.insert({c(0), c(1)});
  auto child = sealed({{0, 1}, {0, 2}});
  merge_link(parent, child);  // the caller broke the disjointness contract
  EXPECT_EQ(parent.collect(false).size(), 3u);
  EXPECT_EQ(parent.collect(true), (std::vector<Tuple>{{c(0), c(1)}, {c(0), c(2)}}));
  EXPECT_EQ(parent.distinct_size(), 2u);
}

TEST(Iterate, DedupIsNoOpOnDisjointSegments) {
  AnswerTable parent(2);
  std::vector<Tuple> all;
  for (std::uint32_t s = 0; s < 4; ++s) {
    AnswerTable child(2);
    for (std::uint32_t i = 0; i < 10; ++i) {
      child.insert({c(s), c(i)});
      all.push_back({c(s), c(i)});
    }
    child.seal();
    merge_link(parent, child);
  }
  EXPECT_EQ(as_multiset(parent.collect(false)), as_multiset(all));
  EXPECT_EQ(as_multiset(parent.collect(true)), as_multiset(all));
}

TEST(Iterate, InsertAfterLinkSeesLaterSegments) {
  AnswerTable parent(2);
  auto child = sealed({{0, 1}});
  merge_link(parent, child);
  EXPECT_EQ(parent.insert({c(0), c(1)}), InsertResult::Duplicate);
  EXPECT_EQ(parent.size(), 1u);
}

TEST(Claims, SingleThreadBehavesAsSet) {
  std::mt19937_64 rng(3);
  ClaimSet cs;
  std::set<ClaimKey> ref;
  for (int i = 0; i < 20000; ++i) {
    const ClaimKey k = rng() % 3000;
    const bool fresh = ref.insert(k).second;
    ASSERT_EQ(cs.try_claim(k), fresh ? ClaimResult::Claimed : ClaimResult::AlreadyClaimed);
  }
  EXPECT_EQ(cs.size(), ref.size());
  DenseClaimSet dense(3000);
  std::set<std::uint32_t> dref;
  for (int i = 0; i < 20000; ++i) {
    const auto k = static_cast<std::uint32_t>(rng() % 3000);
    ASSERT_EQ(dense.try_claim(c(k)), dref.insert(k).second ? ClaimResult::Claimed : ClaimResult::AlreadyClaimed);
  }
  EXPECT_EQ(dense.size(), dref.size());
}

TEST(Claims, FirstClaimThenAlreadyClaimed) {
  ClaimSet cs;
  EXPECT_EQ(cs.try_claim(c(5)), ClaimResult::Claimed);
  EXPECT_EQ(cs.try_claim(c(5)), ClaimResult::AlreadyClaimed);
  EXPECT_TRUE(cs.is_claimed(5));
}

TEST(Claims, ConcurrentExactlyOnce) {
  constexpr std::size_t kThreads = 8, kAttempts = 20000, kKeys = 2000;
  ClaimSet cs;
  DenseClaimSet dense(kKeys);
  std::atomic<std::size_t> won{0}, won_dense{0};
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < kThreads; ++t)
    threads.emplace_back([&, t] {
      std::mt19937_64 rng(t + 1);
      for (std::size_t i = 0; i < kAttempts; ++i) {
        const auto k = static_cast<std::uint32_t>(rng() % kKeys);
        if (cs.try_claim(c(k)) == ClaimResult::Claimed) won.fetch_add(1);
        if (dense.try_claim(c(k)) == ClaimResult::Claimed) won_dense.fetch_add(1);
      }
    });
  for (auto& th : threads) th.join();
  // With 160000 uniform draws over 2000 keys every key is hit.
  EXPECT_EQ(won.load(), kKeys);
  EXPECT_EQ(won_dense.load(), kKeys);
}

TEST(Claims, SubgoalKeyDistinguishesPredicateAndArgs) {
  const std::vector<ConstId> ab{c(1), c(2)}, ba{c(2), c(1)};
  EXPECT_NE(subgoal_key(PredId{0}, ab), subgoal_key(PredId{1}, ab));
  EXPECT_NE(subgoal_key(PredId{0}, ab), subgoal_key(PredId{0}, ba));
  EXPECT_EQ(subgoal_key(PredId{0}, ab), subgoal_key(PredId{0}, ab));
}
