// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "trajlabel/enhancer.hpp"
#include "trajlabel/geometry.hpp"

namespace trajlabel
{
namespace
{

Box3D car(double x, double y, double yaw = 0.0)
{
  return make_box(x, y, 0.8, 4.5, 1.9, 1.6, yaw, kCar, 0.8);
}

ForecastSet set_of(int context, int target, std::vector<Box3D> boxes)
{
  ForecastSet s{context, target, {}};
  for (std::size_t i = 0; i < boxes.size(); ++i) s.boxes.push_back({TrackId(i), boxes[i]});
  return s;
}

// Boxes clustered around a few anchors so pairwise IoUs spread over [0, 1].
Box3D jittered(std::mt19937_64 & rng)
{
  std::uniform_int_distribution<int> anchor(0, 2), cls(0, 1);
  std::normal_distribution<double> j(0.0, 1.2), yaw(0.0, 0.3);
  const double ax = 6.0 * anchor(rng);
  Box3D b = car(ax + j(rng), j(rng), normalize_yaw(yaw(rng)));
  b.class_id = cls(rng);
  return b;
}

TEST(MatchCounts, IdenticalInThreeContexts)
{
  const std::vector<Box3D> labels{car(0, 0), car(30, 0)};
  const std::vector<ForecastSet> sets{set_of(4, 7, {car(0, 0)}), set_of(5, 7, {car(0, 0)}),
                                      set_of(6, 7, {car(0, 0), car(60, 0)})};
  EXPECT_EQ(match_counts(labels, sets, 0.3), (std::vector<int>{3, 0}));
}

TEST(MatchCounts, BelowThresholdContributesNothing)
{
  // Offset chosen so the IoU is about 0.2.
  Box3D f = car(0, 0);
  f.x = 4.5 * (1.0 - 2.0 * 0.2 / 1.2);
  ASSERT_NEAR(bev_iou(car(0, 0), f), 0.2, 1e-9);
  EXPECT_EQ(match_counts(std::vector<Box3D>{car(0, 0)}, std::vector<ForecastSet>{set_of(1, 2, {f})}, 0.3),
            std::vector<int>{0});
}

TEST(MatchCounts, OtherClassNeverMatches)
{
  Box3D truck = car(0, 0);
  truck.class_id = kTruck;
  EXPECT_EQ(match_counts(std::vector<Box3D>{car(0, 0)}, std::vector<ForecastSet>{set_of(1, 2, {truck})}, 0.3),
            std::vector<int>{0});
}

TEST(MatchCounts, RandomScenarioMatchesBruteForce)
{
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Box3D> labels;
    for (int i = 0; i < 6; ++i) labels.push_back(jittered(rng));
    std::vector<ForecastSet> sets;
    for (int c = 0; c < 4; ++c) {
      std::vector<Box3D> boxes;
      for (int k = 0; k < 4; ++k) boxes.push_back(jittered(rng));
      sets.push_back(set_of(c, 5, boxes));
    }
    EXPECT_EQ(match_counts(labels, sets, 0.3), oracle::match_counts(labels, sets, 0.3));
  }
}

TEST(ComputeWeights, AffineInCount)
{
  EXPECT_EQ(compute_weights(std::vector<int>{0, 3}, 1.0, 0.25), (std::vector<double>{1.0, 1.75}));
  EXPECT_EQ(compute_weights(std::vector<int>{0, 1, 9}, 1.3, 0.0), (std::vector<double>{1.3, 1.3, 1.3}));
}

TEST(ComputeWeights, SortingByCountSortsByWeight)
{
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> c(0, 10);
  std::vector<int> counts;
  for (int i = 0; i < 100; ++i) counts.push_back(c(rng));
  const auto w = compute_weights(counts, 1.0, 0.25);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[i] < counts[j]) {
        EXPECT_LT(w[i], w[j]);
      }
      if (counts[i] == counts[j]) {
        EXPECT_EQ(w[i], w[j]);
      }
    }
  }
}

TEST(FindUnmatched, OverlapExcludedIsolatedIncluded)
{
  const std::vector<Box3D> labels{car(0, 0)};
  const std::vector<ForecastSet> same{set_of(3, 4, {car(0, 0)})};
  EXPECT_TRUE(find_unmatched(same, labels, 0.1).empty());
  const std::vector<ForecastSet> far{set_of(3, 4, {car(100, 0)})};
  const auto got = find_unmatched(far, labels, 0.1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].first, 3);
  EXPECT_EQ(got[0].second, car(100, 0));
}

TEST(FindUnmatched, RandomScenarioMatchesBruteForce)
{
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Box3D> labels;
    for (int i = 0; i < 5; ++i) labels.push_back(jittered(rng));
    std::vector<ForecastSet> sets;
    for (int c = 0; c < 3; ++c) {
      std::vector<Box3D> boxes;
      for (int k = 0; k < 4; ++k) boxes.push_back(jittered(rng));
      sets.push_back(set_of(c, 5, boxes));
    }
    std::vector<std::pair<int, Box3D>> want;
    for (const ForecastSet & s : sets) {
      for (const ForecastBox & f : s.boxes) {
        bool overlaps = false;
        for (const Box3D & l : labels) {
          overlaps |= l.class_id == f.box.class_id && bev_iou(l, f.box) > 0.1;
        }
        if (!overlaps) want.emplace_back(s.context_frame, f.box);
      }
    }
    EXPECT_EQ(find_unmatched(sets, labels, 0.1), want);
  }
}

TEST(GammaSchedule, LinearExamples)
{
  const std::vector<double> want{0.8, 0.65, 0.5, 0.35, 0.2};
  const auto g = gamma_schedule(5, 0.8, 0.2);
  ASSERT_EQ(g.size(), want.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], want[i], 1e-12);
  EXPECT_EQ(g.back(), 0.2);
  EXPECT_EQ(gamma_schedule(1, 0.8, 0.2), std::vector<double>{0.8});
  EXPECT_EQ(gamma_schedule(4, 0.5, 0.5), (std::vector<double>(4, 0.5)));
  EXPECT_THROW(gamma_schedule(0, 0.8, 0.2), std::invalid_argument);
}

TEST(GammaSchedule, NonIncreasingWithinBounds)
{
  for (int t = 1; t <= 20; ++t) {
    const auto g = gamma_schedule(t, 0.9, 0.1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(g[i], 0.9);
      EXPECT_GE(g[i], 0.1);
      if (i > 0) {
        EXPECT_LE(g[i], g[i - 1]);
      }
    }
  }
}

TEST(DedupInsertions, NewestContextWins)
{
  const std::vector<std::pair<int, Box3D>> cands{{2, car(0, 0)}, {5, car(0.3, 0)}, {3, car(50, 0)}};
  const auto kept = dedup_insertions(cands, 0.3);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].first, 5);
  EXPECT_EQ(kept[1].first, 3);
}

TEST(EnhanceFrame, NoForecastsKeepsBaseWeights)
{
  const Frame f{"s", 4, 2.0, {car(0, 0), car(10, 0)}};
  const EnhancedFrame e = enhance_frame(f, {}, EnhancerConfig{});
  ASSERT_EQ(e.labels.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(e.labels[i].box, f.boxes[i]);
    EXPECT_EQ(e.labels[i].weight, 1.0);
    EXPECT_EQ(e.labels[i].origin, LabelOrigin::Teacher);
    EXPECT_EQ(e.match_counts[i], 0);
  }
}

TEST(EnhanceFrame, OneMatchOneInsertion)
{
  const Frame f{"s", 4, 2.0, {car(0, 0), car(10, 0)}};
  const std::vector<ForecastSet> sets{set_of(3, 4, {car(0.2, 0), car(40, 0)})};
  const EnhancedFrame e = enhance_frame(f, sets, EnhancerConfig{});
  ASSERT_EQ(e.labels.size(), 3u);
  EXPECT_EQ(e.labels[0].weight, 1.25);
  EXPECT_EQ(e.labels[1].weight, 1.0);
  EXPECT_EQ(e.labels[2].origin, LabelOrigin::Inserted);
  EXPECT_EQ(e.labels[2].box, car(40, 0));
  EXPECT_EQ(e.labels[2].weight, 0.8);
  EXPECT_EQ(e.labels[2].context_frame, 3);
  EXPECT_EQ(e.match_counts, (std::vector<int>{1, 0, 0}));
}

TEST(EnhanceFrame, InsertionWeightFollowsAge)
{
  EnhancerConfig cfg;
  cfg.gamma_horizon = 5;
  const Frame f{"s", 10, 5.0, {}};
  const std::vector<ForecastSet> sets{set_of(9, 10, {car(0, 0)}), set_of(7, 10, {car(20, 0)}),
                                      set_of(3, 10, {car(40, 0)})};
  const EnhancedFrame e = enhance_frame(f, sets, cfg);
  ASSERT_EQ(e.labels.size(), 3u);
  EXPECT_NEAR(e.labels[0].weight, 0.8, 1e-12);   // age 1
  EXPECT_NEAR(e.labels[1].weight, 0.5, 1e-12);   // age 3
  EXPECT_EQ(e.labels[2].weight, 0.2);            // age 7, past the schedule
}

TEST(EnhanceFrame, WeightInvariants)
{
  std::mt19937_64 rng(8);
  const EnhancerConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    Frame f{"s", 6, 3.0, {}};
    for (int i = 0; i < 4; ++i) f.boxes.push_back(jittered(rng));
    std::vector<ForecastSet> sets;
    for (int c = 2; c < 6; ++c) {
      std::vector<Box3D> boxes;
      for (int k = 0; k < 3; ++k) boxes.push_back(jittered(rng));
      sets.push_back(set_of(c, 6, boxes));
    }
    const EnhancedFrame e = enhance_frame(f, sets, cfg);
    std::size_t teacher = 0;
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
      if (e.labels[i].origin == LabelOrigin::Teacher) {
        EXPECT_EQ(e.labels[i].box, f.boxes[teacher]);
        EXPECT_GE(e.labels[i].weight, cfg.alpha);
        ++teacher;
      } else {
        EXPECT_GT(e.labels[i].weight, 0.0);
        EXPECT_LE(e.labels[i].weight, 1.0);
        EXPECT_EQ(e.match_counts[i], 0);
      }
    }
    EXPECT_EQ(teacher, f.boxes.size());
    EXPECT_EQ(e.match_counts.size(), e.labels.size());
  }
}

TEST(EnhanceFrame, InsertionSwitchAndWrongTarget)
{
  EnhancerConfig cfg;
  cfg.insert_unmatched = false;
  const Frame f{"s", 4, 2.0, {car(0, 0)}};
  EXPECT_EQ(enhance_frame(f, std::vector<ForecastSet>{set_of(3, 4, {car(40, 0)})}, cfg).labels.size(), 1u);
  EXPECT_THROW(enhance_frame(f, std::vector<ForecastSet>{set_of(3, 5, {car(40, 0)})}, cfg),
               std::invalid_argument);
}

TEST(EnhancerConfig, Validation)
{
  EnhancerConfig c;
  EXPECT_TRUE(c.validate().empty());
  c.gamma_min = 0.9;
  EXPECT_FALSE(c.validate().empty());
  c = {};
  c.alpha = 0.0;
  EXPECT_FALSE(c.validate().empty());
  c = {};
  c.tau_min_iou = 1.5;
  EXPECT_FALSE(c.validate().empty());
  c = {};
  c.beta = -0.1;
  EXPECT_FALSE(c.validate().empty());
}

}  // namespace
}  // namespace trajlabel
