#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "support.hpp"

using namespace ccm;
using namespace ccm::testing;
using Q = boost::multiprecision::cpp_rational;

TEST(Assortativity, RegularGraphIsNan) {
  ColoredMultigraph g({0, 0, 0, 0}, 1);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(3, 0);
  EXPECT_TRUE(std::isnan(degree_assortativity(g)));
}

TEST(Assortativity, StarIsMinusOne) {
  ColoredMultigraph g({0, 0, 0, 0, 0}, 1);
  for (VertexId v = 1; v <= 4; ++v) g.add_edge(0, v);
  EXPECT_NEAR(degree_assortativity(g), -1.0, 1e-12);
}

TEST(Assortativity, MatchesNaiveAndIgnoresLabels) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(25, 70, 2, rng);
    const double r = degree_assortativity(g);
    EXPECT_NEAR(r, naive_assortativity(g), 1e-12);
    std::vector<VertexId> perm(g.num_vertices());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ColorId> colors(g.num_vertices());
    for (VertexId v = 0; v < g.num_vertices(); ++v) colors[perm[v]] = g.color(v);
    ColoredMultigraph h(colors, g.num_colors());
    for (const Edge& e : g.edges()) h.add_edge(perm[e.a], perm[e.b]);
    EXPECT_NEAR(degree_assortativity(h), r, 1e-12);
  }
  ColoredMultigraph empty({0}, 1);
  EXPECT_THROW(degree_assortativity(empty), std::invalid_argument);
}

TEST(Theta, SingleColorIsOne) {
  std::mt19937_64 rng(62);
  const auto g = random_graph(10, 30, 1, rng);
  EXPECT_EQ(theta<Q>(g), Q(1));
  ColoredMultigraph tiny({0}, 1);
  tiny.add_edge(0, 0);
  EXPECT_THROW(theta(tiny), std::invalid_argument);
}

TEST(Theta, EqualClassSizesScaleAsInverseSquare) {
  const std::uint64_t s = 6;
  for (std::size_t k : {2u, 4u, 8u}) {
    // one vertex per color, s occurrences per color class
    std::vector<ColorId> colors;
    for (ColorId c = 0; c < k; ++c) colors.push_back(c);
    ColoredMultigraph g(colors, k);
    for (ColorId l = 0; l < k; ++l)
      for (ColorId r = l; r < k; ++r)
        for (std::uint64_t i = 0; i < s; ++i) g.add_edge(l, r);
    const std::uint64_t classes = k * (k + 1) / 2;
    const std::uint64_t m = s * classes;
    const Q expected = (Q(k * s * (s - 1)) + Q((classes - k) * s * (s - 1)) / 2) / Q(m * (m - 1));
    EXPECT_EQ(theta<Q>(g), expected) << "k=" << k;
    const double scaled = theta(g) * double(k * k);
    EXPECT_GT(scaled, 0.5);
    EXPECT_LT(scaled, 4.0);
  }
}

// Monte-Carlo estimate of the event "two uniformly drawn distinct occurrences
// and a fair orientation coin form a CDM-preserving pairing of one class".
TEST(Theta, MatchesPairingEventFrequency) {
  std::mt19937_64 rng(63);
  const auto g = random_graph(60, 200, 3, rng);
  const double th = theta(g);
  const int draws = 1000000;
  std::uniform_int_distribution<EdgeHandle> pick(0, EdgeHandle(g.num_edges() - 1));
  std::bernoulli_distribution coin(0.5);
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    EdgeHandle a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    const Edge ea = g.edge(a), eb = g.edge(b);
    const bool flip = coin(rng);
    if (g.class_of(ea) != g.class_of(eb)) continue;
    if (g.color(ea.a) == g.color(ea.b)) {
      ++hits;
    } else {
      VertexId u = ea.a, v = ea.b;
      if (flip) std::swap(u, v);
      const VertexId x = eb.a;
      if (g.color(u) != g.color(x)) ++hits;
    }
  }
  const double sigma = std::sqrt(th * (1 - th) / draws);
  EXPECT_NEAR(double(hits) / draws, th, 3 * sigma);
}

TEST(Theta, InUnitIntervalAndOneOnlyForSingleClass) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(20, 50, 1 + trial % 4, rng, trial % 2 == 0);
    const double th = theta(g);
    EXPECT_GT(th, 0.0);
    EXPECT_LE(th, 1.0);
    std::size_t nonempty = 0;
    for (std::size_t c = 0; c < g.num_class_slots(); ++c) nonempty += !g.class_list(c).empty();
    EXPECT_EQ(th == 1.0, nonempty == 1);
  }
}

TEST(MStatistic, MonochromaticIsOne) {
  std::mt19937_64 rng(65);
  const auto g = random_graph(20, 50, 1, rng);
  const auto s = m_statistics(g);
  EXPECT_DOUBLE_EQ(s.m, 1.0);
  for (const auto& mv : s.per_vertex)
    if (mv) EXPECT_DOUBLE_EQ(*mv, 1.0);
}

TEST(MStatistic, FigureOneValues) {
  const auto f = figure_one();
  const auto s = m_statistics(f.graph);
  EXPECT_DOUBLE_EQ(*s.per_vertex[f.vertex("5")], 1.0);
  EXPECT_DOUBLE_EQ(*s.per_vertex[f.vertex("2")], 0.8);
}

TEST(MStatistic, MatchesNeighborRecountAndSkipsIsolated) {
  std::mt19937_64 rng(66);
  const auto g = random_graph(40, 50, 3, rng);
  const auto s = m_statistics(g);
  double sum = 0.0;
  std::size_t counted = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    std::uint32_t same = 0, all = 0;
    for (const Edge& e : g.edges()) {
      if (e.a == v) ++all, same += g.color(e.b) == g.color(v);
      if (e.b == v) ++all, same += g.color(e.a) == g.color(v);
    }
    if (all == 0) {
      EXPECT_FALSE(s.per_vertex[v].has_value());
      continue;
    }
    ASSERT_TRUE(s.per_vertex[v].has_value());
    EXPECT_NEAR(*s.per_vertex[v], double(same) / all, 1e-15);
    sum += double(same) / all;
    ++counted;
  }
  EXPECT_LT(counted, g.num_vertices());
  EXPECT_NEAR(s.m, sum / counted, 1e-12);
}

TEST(TopDegree, Selection) {
  ColoredMultigraph g({0, 0, 1, 1}, 2);
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_edge(1, 0);
  g.add_edge(2, 3);
  g.add_edge(0, 3);
  // degrees: 0:2, 1:3, 2:2, 3:3
  const auto all = top_degree_mv(g, 10);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0].vertex, 1u);
  EXPECT_EQ(all[1].vertex, 3u);
  EXPECT_EQ(all[2].vertex, 0u);
  EXPECT_EQ(all[3].vertex, 2u);
  g.add_edge(1, 1);
  const auto one = top_degree_mv(g, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].vertex, 1u);
  EXPECT_THROW(top_degree_mv(g, 0), std::invalid_argument);
}

TEST(Diagnostics, EqualCdmGivesEqualStatistics) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 5; ++trial) {
    auto g = random_graph(30, 90, 3, rng);
    const auto before = g;
    ChainConfig cfg;
    cfg.iterations = 5000;
    run_sirius(g, cfg, rng);
    ASSERT_EQ(cdm(g), cdm(before));
    EXPECT_EQ(m_statistics(g).m, m_statistics(before).m);
    EXPECT_EQ(theta(g), theta(before));
    EXPECT_EQ(jcm(g), jcm(before));
  }
}

TEST(Diagnostics, TraceCsv) {
  ChainTrace t;
  OutcomeTally a;
  a.accepted = 2;
  a.out_of_space = 1;
  t.snapshots.push_back({3, 0.25, a});
  t.snapshots.push_back({6, std::nan(""), a});
  std::ostringstream os;
  write_trace_csv(os, t);
  EXPECT_EQ(os.str(),
            "iteration,assortativity,out_of_space,non_changing,accepted,rejected,lazy_hold\n"
            "3,0.25,1,0,2,0,0\n6,nan,1,0,2,0,0\n");
}
