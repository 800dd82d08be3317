#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "atlas_support.hpp"
#include "ccm/polarization.hpp"

using namespace ccm;
using namespace ccm::testing;

namespace {

/// Hubs 0 (A) and 4 (B) are joined. Vertices 1, 2 of A hang off the B hub,
/// 5, 6 of B off the A hub, and 3 (A) and 7 (B) touch both hubs.
ColoredMultigraph crossing_instance() {
  return make_graph({0, 0, 0, 0, 1, 1, 1, 1}, 2,
                    {{0, 4}, {1, 4}, {2, 4}, {5, 0}, {6, 0}, {3, 0}, {3, 4}, {7, 0}, {7, 4}});
}

/// Side of the influencer where a restart walk from a uniform start in `side` stops.
Side simulate_walk(const std::vector<VertexId>& starts, const std::vector<int>& influencer_side,
                   const std::vector<std::vector<VertexId>>& nbrs, double restart, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick_start(0, starts.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VertexId v = starts[pick_start(rng)];
  while (true) {
    if (influencer_side[v] >= 0) return influencer_side[v] == 0 ? Side::A : Side::B;
    if (unit(rng) < restart) {
      v = starts[pick_start(rng)];
      continue;
    }
    if (nbrs[v].empty()) continue;
    std::uniform_int_distribution<std::size_t> step(0, nbrs[v].size() - 1);
    v = nbrs[v][step(rng)];
  }
}

}  // namespace

TEST(Communities, TwoColors) {
  ColoredMultigraph g({0, 1, 1, 0, 1}, 2);
  const auto s = map_communities(g);
  EXPECT_EQ(s[1], Side::A);
  EXPECT_EQ(s[0], Side::B);
}

TEST(Communities, LargestColorAgainstRest) {
  std::vector<ColorId> colors;
  for (int i = 0; i < 3; ++i) colors.push_back(0);
  for (int i = 0; i < 5; ++i) colors.push_back(1);
  for (int i = 0; i < 2; ++i) colors.push_back(2);
  ColoredMultigraph g(colors, 3);
  const auto s = map_communities(g);
  EXPECT_EQ(s[1], Side::A);
  EXPECT_EQ(s[0], Side::B);
  EXPECT_EQ(s[2], Side::B);
}

TEST(Communities, TieGoesToLowerColor) {
  ColoredMultigraph g({1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, 2);
  const auto s = map_communities(g);
  EXPECT_EQ(s[0], Side::A);
  EXPECT_EQ(s[1], Side::B);
  ColoredMultigraph mono({0, 0}, 1);
  EXPECT_THROW(map_communities(mono), ScoreError);
}

TEST(Rwc, DisjointCommunitiesScoreOne) {
  ColoredMultigraph g({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  for (VertexId a = 0; a < 5; ++a)
    for (VertexId b = a + 1; b < 5; ++b) {
      g.add_edge(a, b);
      g.add_edge(a + 5, b + 5);
    }
  RwcConfig cfg;
  cfg.influencers = 2;
  const auto r = rwc(g, cfg);
  EXPECT_NEAR(r.score, 1.0, 1e-6);
  EXPECT_NEAR(r.p_ab, 0.0, 1e-12);
}

// With restart 1/2 each hanging vertex reaches the far hub before a restart
// with probability 1/2, which offsets the start mass on the own hub.
TEST(Rwc, SymmetricCrossingScoresZero) {
  RwcConfig cfg;
  cfg.influencers = 1;
  cfg.restart = 0.5;
  const auto r = rwc(crossing_instance(), cfg);
  EXPECT_EQ(r.influencers_a, (std::vector<VertexId>{0}));
  EXPECT_EQ(r.influencers_b, (std::vector<VertexId>{4}));
  EXPECT_NEAR(r.p_aa, 0.5, 1e-9);
  EXPECT_NEAR(r.score, 0.0, 1e-3);
}

TEST(Rwc, CompleteGraphClosedForm) {
  // K8, one influencer per side. From a non-influencer the walk reaches some
  // influencer before a restart with probability a = 2(1-r)/(7-5(1-r)), split
  // evenly; the side-X start mass is 1 + 3a with X-absorption 1 + 1.5a.
  ColoredMultigraph g({0, 0, 0, 0, 1, 1, 1, 1}, 2);
  for (VertexId a = 0; a < 8; ++a)
    for (VertexId b = a + 1; b < 8; ++b) g.add_edge(a, b);
  RwcConfig cfg;
  cfg.influencers = 1;
  const double beta = 1.0 - cfg.restart;
  const double a = 2 * beta / (7 - 5 * beta);
  const double p = (1 + 1.5 * a) / (1 + 3 * a);
  const auto r = rwc(g, cfg);
  EXPECT_NEAR(r.p_aa, p, 1e-9);
  EXPECT_NEAR(r.p_bb, p, 1e-9);
  EXPECT_NEAR(r.score, p * p - (1 - p) * (1 - p), 1e-9);
}

TEST(Rwc, RowsSumToOneAndInvariances) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = random_graph(30, 90, 2, rng);
    RwcConfig cfg;
    cfg.influencers = 3;
    const auto r = rwc(g, cfg);
    EXPECT_NEAR(r.p_aa + r.p_ab, 1.0, 1e-9);
    EXPECT_NEAR(r.p_ba + r.p_bb, 1.0, 1e-9);
    ColoredMultigraph doubled(g.colors(), g.num_colors());
    for (const Edge& e : g.edges()) doubled.add_edge(e.a, e.b), doubled.add_edge(e.a, e.b);
    EXPECT_NEAR(rwc(doubled, cfg).score, r.score, 1e-9);
    // relabel by reversing ids; degree ties would break differently, so only
    // compare when the chosen influencers are unambiguous
    const std::size_t n = g.num_vertices();
    std::vector<ColorId> colors(n);
    for (VertexId v = 0; v < n; ++v) colors[n - 1 - v] = g.color(v);
    ColoredMultigraph rev(colors, g.num_colors());
    for (const Edge& e : g.edges()) rev.add_edge(VertexId(n - 1 - e.a), VertexId(n - 1 - e.b));
    const auto rr = rwc(rev, cfg);
    std::vector<VertexId> mapped;
    for (VertexId v : rr.influencers_a) mapped.push_back(VertexId(n - 1 - v));
    std::sort(mapped.begin(), mapped.end());
    auto original = r.influencers_a;
    std::sort(original.begin(), original.end());
    if (mapped == original) EXPECT_NEAR(rr.p_aa, r.p_aa, 1e-9);
  }
}

TEST(Rwc, MatchesWalkSimulation) {
  std::mt19937_64 rng(82);
  const auto g = random_graph(12, 30, 2, rng);
  RwcConfig cfg;
  cfg.influencers = 2;
  const auto r = rwc(g, cfg);
  const auto sides = map_communities(g);
  std::vector<int> influencer_side(g.num_vertices(), -1);
  for (VertexId v : r.influencers_a) influencer_side[v] = 0;
  for (VertexId v : r.influencers_b) influencer_side[v] = 1;
  std::vector<std::vector<VertexId>> nbrs(g.num_vertices());
  for (const Edge& e : g.edges()) {
    nbrs[e.a].push_back(e.b);
    nbrs[e.b].push_back(e.a);
  }
  const int walks = 500000;
  double est[2];
  for (Side s : {Side::A, Side::B}) {
    std::vector<VertexId> starts;
    for (VertexId v = 0; v < g.num_vertices(); ++v)
      if (sides[g.color(v)] == s) starts.push_back(v);
    int same = 0;
    for (int i = 0; i < walks; ++i) same += simulate_walk(starts, influencer_side, nbrs, cfg.restart, rng) == s;
    est[s == Side::A ? 0 : 1] = double(same) / walks;
  }
  const double sa = std::sqrt(r.p_aa * (1 - r.p_aa) / walks), sb = std::sqrt(r.p_bb * (1 - r.p_bb) / walks);
  EXPECT_NEAR(est[0], r.p_aa, 3 * sa);
  EXPECT_NEAR(est[1], r.p_bb, 3 * sb);
  EXPECT_NEAR(est[0] + est[1] - 1.0, r.score, 3 * std::sqrt(sa * sa + sb * sb));
}

TEST(Significance, PValueFormula) {
  SignificanceResult below;
  below.observed = 0.0;
  below.nulls = std::vector<double>(9, 1.0);
  fill_p_values(below);
  EXPECT_DOUBLE_EQ(below.p_one_sided_ge, 1.0);
  EXPECT_DOUBLE_EQ(below.p_one_sided_le, 0.1);
  EXPECT_DOUBLE_EQ(below.p_two_sided, 0.2);
  SignificanceResult above;
  above.observed = 2.0;
  above.nulls = std::vector<double>(99, 1.0);
  fill_p_values(above);
  EXPECT_DOUBLE_EQ(above.p_one_sided_ge, 0.01);
  EXPECT_DOUBLE_EQ(above.p_one_sided_le, 1.0);
}

TEST(Significance, MUnderColoredNullIsPointMass) {
  std::mt19937_64 rng(83);
  const auto g = random_graph(40, 120, 3, rng);
  ChainConfig cfg;
  cfg.algorithm = Algorithm::Sirius;
  cfg.seed = 5;
  const auto r = significance_test(g, cfg, Score::M, 20);
  ASSERT_EQ(r.nulls.size(), 20u);
  for (double x : r.nulls) EXPECT_EQ(x, r.observed);
  EXPECT_DOUBLE_EQ(r.p_one_sided_ge, 1.0);
}

TEST(Significance, MUnderPlainNullDropsOnAssortativeGraph) {
  std::mt19937_64 rng(84);
  const auto g = planted_assortative(100, 400, 4.0, rng);
  ChainConfig cfg;
  cfg.algorithm = Algorithm::Cm;
  cfg.seed = 6;
  const auto r = significance_test(g, cfg, Score::M, 20);
  for (double x : r.nulls) EXPECT_LT(x, r.observed);
  EXPECT_NEAR(r.p_one_sided_ge, 1.0 / 21.0, 1e-12);
}

TEST(Significance, RwcNullsRun) {
  std::mt19937_64 rng(85);
  const auto g = planted_assortative(60, 200, 4.0, rng);
  ChainConfig cfg;
  cfg.algorithm = Algorithm::Sirius;
  cfg.seed = 7;
  RwcConfig rcfg;
  rcfg.influencers = 3;
  const auto r = significance_test(g, cfg, Score::Rwc, 10, rcfg, 2);
  ASSERT_EQ(r.nulls.size(), 10u);
  for (double x : r.nulls) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
}
