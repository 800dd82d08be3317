#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ccm/diagnostics.hpp"
#include "ccm/graph.hpp"
#include "ccm/swap.hpp"

namespace ccm {

enum class Algorithm { Sirius, SiriusB, Cm };
enum class Laziness { None, Half };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sirius: return "sirius";
    case Algorithm::SiriusB: return "sirius-b";
    case Algorithm::Cm: return "cm";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "sirius") return Algorithm::Sirius;
  if (s == "sirius-b" || s == "sirius_b") return Algorithm::SiriusB;
  if (s == "cm") return Algorithm::Cm;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChainConfig {
  Algorithm algorithm = Algorithm::Sirius;
  std::optional<std::uint64_t> iterations;  ///< unset: ceil(m ln m)
  Laziness laziness = Laziness::None;
  std::uint64_t seed = 1;
  bool trace = false;
  std::optional<std::uint64_t> trace_stride;  ///< unset: 100 evenly spaced snapshots
  /// Refuse to run a possibly periodic chain instead of switching to the lazy chain.
  bool strict = false;
  /// Sirius-B only: keep proposing until `iterations` CDM-preserving proposals were made.
  bool count_valid_only = false;
  /// Re-check the full CDM after every accepted move (slow, for testing).
  bool check_every_step = false;
};

inline std::uint64_t default_iterations(std::size_t m) {
  if (m < 2) return 0;
  return static_cast<std::uint64_t>(std::ceil(double(m) * std::log(double(m))));
}

inline std::uint64_t resolved_iterations(const ChainConfig& c, const ColoredMultigraph& g) {
  return c.iterations ? *c.iterations : default_iterations(g.num_edges());
}

struct ChainResult {
  OutcomeTally tally;
  ChainTrace trace;
  std::uint64_t inner_steps = 0;  ///< steps of the non-lazy chain actually executed
  bool laziness_forced = false;
};

/// Uniform target: every state has the same weight.
struct UniformTarget {
  double ratio(const ColoredMultigraph&, const SwapProposal&) const { return 1.0; }
  template <class Scalar>
  Scalar weight(const ColoredMultigraph&) const { return Scalar(1); }
};

/// Target weight `base^(number of self-loop occurrences)`. The ratio for a
/// swap only depends on how many loops the two touched occurrences carry
/// before and after.
struct SelfLoopWeightTarget {
  unsigned base = 2;

  double ratio(const ColoredMultigraph&, const SwapProposal& p) const {
    const int before = int(p.u == p.v) + int(p.x == p.y);
    const int after = int(p.u == p.x) + int(p.v == p.y);
    return std::pow(double(base), after - before);
  }
  template <class Scalar>
  Scalar weight(const ColoredMultigraph& g) const {
    Scalar w(1);
    for (const Edge& e : g.edges())
      if (e.is_loop()) w *= Scalar(base);
    return w;
  }
};

/// Seed of chain `index` in an ensemble seeded with `seed` (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Number of inner steps that a lazy chain of 2t holding-or-moving steps executes.
template <class Rng>
std::uint64_t lazy_step_count(std::uint64_t t, Rng& rng) {
  if (t == 0) return 0;
  std::binomial_distribution<std::uint64_t> steps(2 * t, 0.5);
  return steps(rng);
}

namespace detail {

template <class Rng>
double unit(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <class Target, class Rng>
Outcome metropolis(ColoredMultigraph& g, const SwapProposal& p, const Target& target, Rng& rng) {
  switch (p.kind) {
    case SwapClass::OutOfSpace: return Outcome::OutOfSpace;
    case SwapClass::NonChangingCdes:
    case SwapClass::Skipped: return Outcome::NonChanging;
    case SwapClass::ChangingCdes: break;
  }
  const double acceptance = p.rho * target.ratio(g, p);
  if (unit(rng) < acceptance) {
    apply_swap(g, p);
    return Outcome::Accepted;
  }
  return Outcome::Rejected;
}

/// Occurrences whose color class holds at least two occurrences. CDES moves
/// keep every occurrence inside its class, so the list is fixed for a run.
inline std::vector<EdgeHandle> swappable_occurrences(const ColoredMultigraph& g) {
  std::vector<EdgeHandle> active;
  active.reserve(g.num_edges());
  for (std::size_t c = 0; c < g.num_class_slots(); ++c) {
    const auto& list = g.class_list(c);
    if (list.size() >= 2) active.insert(active.end(), list.begin(), list.end());
  }
  return active;
}

class SnapshotSchedule {
 public:
  SnapshotSchedule(bool enabled, std::optional<std::uint64_t> stride, std::uint64_t total)
      : enabled_(enabled && total > 0), stride_(stride.value_or(0)), total_(total) {
    if (stride && *stride == 0) throw std::invalid_argument("trace stride must be at least 1");
    advance();
  }
  bool due(std::uint64_t step) const { return enabled_ && step == next_; }
  void advance() {
    if (!enabled_) return;
    if (stride_ > 0) {
      next_ += stride_;
      if (next_ > total_) enabled_ = false;
      return;
    }
    // floor(k * total / 100), skipping duplicates when total < 100.
    std::uint64_t candidate = next_;
    while (candidate <= next_ && k_ < 100) {
      ++k_;
      candidate = static_cast<std::uint64_t>((static_cast<unsigned __int128>(k_) * total_) / 100);
    }
    if (candidate <= next_) {
      enabled_ = false;
      return;
    }
    next_ = candidate;
  }

 private:
  bool enabled_;
  std::uint64_t stride_;
  std::uint64_t total_;
  std::uint64_t next_ = 0;
  std::uint64_t k_ = 0;
};

}  // namespace detail

/// One Sirius step: the second occurrence comes from the class of the first,
/// and the orientation is forced to the CDM-preserving pairing.
template <class Target, class Rng>
Outcome sirius_step(ColoredMultigraph& g, std::span<const EdgeHandle> swappable, const Target& target,
                    Rng& rng) {
  if (swappable.empty()) return Outcome::NonChanging;
  std::uniform_int_distribution<std::size_t> pick(0, swappable.size() - 1);
  const EdgeHandle h1 = swappable[pick(rng)];
  const std::size_t cls = g.class_of(g.edge(h1));
  const EdgeHandle h2 = sample_class_edge_excluding(g, cls, h1, rng);
  const auto [u, v] = oriented(g, h1);
  const bool flip = g.color(u) != g.color(v) || detail::unit(rng) < 0.5;
  const SwapProposal p = make_proposal(g, h1, h2, flip);
  if (p.kind == SwapClass::OutOfSpace) throw ChainError("internal error: Sirius proposed a non-CDES swap");
  return detail::metropolis(g, p, target, rng);
}

/// One Sirius-B step: two distinct occurrences from all of E and a fair
/// orientation coin; a proposal that breaks the CDM leaves the state as is.
template <class Target, class Rng>
Outcome sirius_b_step(ColoredMultigraph& g, const Target& target, Rng& rng) {
  const std::size_t m = g.num_edges();
  if (m < 2) return Outcome::NonChanging;
  std::uniform_int_distribution<std::size_t> first(0, m - 1), second(0, m - 2);
  const auto h1 = static_cast<EdgeHandle>(first(rng));
  auto h2 = static_cast<EdgeHandle>(second(rng));
  if (h2 >= h1) ++h2;
  const bool flip = detail::unit(rng) < 0.5;
  return detail::metropolis(g, make_proposal(g, h1, h2, flip), target, rng);
}

/// One step of the configuration-model chain: Sirius-B without the CDM check.
template <class Target, class Rng>
Outcome cm_step(ColoredMultigraph& g, const Target& target, Rng& rng) {
  const std::size_t m = g.num_edges();
  if (m < 2) return Outcome::NonChanging;
  std::uniform_int_distribution<std::size_t> first(0, m - 1), second(0, m - 2);
  const auto h1 = static_cast<EdgeHandle>(first(rng));
  auto h2 = static_cast<EdgeHandle>(second(rng));
  if (h2 >= h1) ++h2;
  const bool flip = detail::unit(rng) < 0.5;
  return detail::metropolis(g, make_des_proposal(g, h1, h2, flip), target, rng);
}

/// Run the chain selected by `config` on `g` in place.
template <class Rng, class Target = UniformTarget>
ChainResult run_chain(ColoredMultigraph& g, const ChainConfig& config, Rng& rng, const Target& target = {}) {
  ChainResult result;
  const std::uint64_t t = resolved_iterations(config, g);
  Laziness laziness = config.laziness;

  if (config.algorithm != Algorithm::Cm && laziness == Laziness::None && g.num_edges() >= 2 &&
      !has_aperiodicity_witness(g)) {
    if (config.strict)
      throw ChainError("no aperiodicity witness (no two same-color monochromatic edges and no vertex "
                       "with two neighbors of one foreign color); enable laziness to sample");
    laziness = Laziness::Half;
    result.laziness_forced = true;
  }

  std::uint64_t steps = t;
  if (laziness == Laziness::Half) {
    steps = lazy_step_count(t, rng);
    result.tally.lazy_hold = 2 * t - steps;
  }

  const ColoredDegreeMatrix initial = config.check_every_step ? g.cdm() : ColoredDegreeMatrix{};
  const bool until_valid = config.count_valid_only && config.algorithm == Algorithm::SiriusB;
  const std::uint64_t schedule_total = until_valid ? 0 : steps;
  detail::SnapshotSchedule schedule(config.trace, config.trace_stride, schedule_total);

  std::vector<EdgeHandle> swappable;
  if (config.algorithm == Algorithm::Sirius) swappable = detail::swappable_occurrences(g);

  OutcomeTally& tally = result.tally;
  auto step_once = [&]() {
    Outcome o;
    switch (config.algorithm) {
      case Algorithm::Sirius: o = sirius_step(g, swappable, target, rng); break;
      case Algorithm::SiriusB: o = sirius_b_step(g, target, rng); break;
      default: o = cm_step(g, target, rng); break;
    }
    tally.record(o);
    ++result.inner_steps;
    if (config.check_every_step && o == Outcome::Accepted && config.algorithm != Algorithm::Cm &&
        g.cdm() != initial)
      throw ChainError("CDM changed after an accepted move");
    if (schedule.due(result.inner_steps)) {
      result.trace.snapshots.push_back({result.inner_steps, degree_assortativity(g), tally});
      schedule.advance();
    }
  };

  if (until_valid) {
    const bool hopeless = g.num_edges() < 2 || theta(g) == 0.0;
    if (hopeless && steps > 0) throw ChainError("no CDM-preserving proposal is possible on this graph");
    while (tally.valid() < steps) step_once();
  } else {
    for (std::uint64_t i = 0; i < steps; ++i) step_once();
  }
  return result;
}

template <class Rng, class Target = UniformTarget>
ChainResult run_sirius(ColoredMultigraph& g, ChainConfig config, Rng& rng, const Target& target = {}) {
  config.algorithm = Algorithm::Sirius;
  return run_chain(g, config, rng, target);
}

template <class Rng, class Target = UniformTarget>
ChainResult run_sirius_b(ColoredMultigraph& g, ChainConfig config, Rng& rng, const Target& target = {}) {
  config.algorithm = Algorithm::SiriusB;
  return run_chain(g, config, rng, target);
}

template <class Rng, class Target = UniformTarget>
ChainResult run_cm(ColoredMultigraph& g, ChainConfig config, Rng& rng, const Target& target = {}) {
  config.algorithm = Algorithm::Cm;
  return run_chain(g, config, rng, target);
}

/// Lazy version of the configured chain: Binomial(2t, 1/2) inner steps.
template <class Rng, class Target = UniformTarget>
ChainResult run_lazy(ColoredMultigraph& g, ChainConfig config, Rng& rng, const Target& target = {}) {
  config.laziness = Laziness::Half;
  return run_chain(g, config, rng, target);
}

struct EnsembleOptions {
  std::size_t samples = 1;
  std::size_t parallelism = 1;
  /// 0: a fresh chain of t steps per sample. k > 0: one chain, burn-in of t
  /// steps, then a sample every k steps.
  std::uint64_t thinning = 0;
};

struct Ensemble {
  std::vector<ColoredMultigraph> graphs;
  std::vector<ChainResult> results;
};

/// z independent samples; chain i is seeded with derive_seed(config.seed, i)
/// and results are ordered by chain index.
template <class Target = UniformTarget>
Ensemble sample_ensemble(const ColoredMultigraph& g, const ChainConfig& config, const EnsembleOptions& opts,
                         const Target& target = {}) {
  if (opts.samples == 0) throw std::invalid_argument("ensemble needs at least one sample");
  Ensemble out;
  out.graphs.assign(opts.samples, g);
  out.results.resize(opts.samples);

  if (opts.thinning > 0) {
    std::mt19937_64 rng(derive_seed(config.seed, 0));
    ColoredMultigraph state = g;
    ChainConfig burn = config;
    out.results[0] = run_chain(state, burn, rng, target);
    out.graphs[0] = state;
    ChainConfig hop = config;
    hop.iterations = opts.thinning;
    hop.trace = false;
    for (std::size_t i = 1; i < opts.samples; ++i) {
      out.results[i] = run_chain(state, hop, rng, target);
      out.graphs[i] = state;
    }
    return out;
  }

  auto run_one = [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(config.seed, i));
    out.results[i] = run_chain(out.graphs[i], config, rng, target);
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.parallelism, opts.samples));
  if (workers == 1) {
    for (std::size_t i = 0; i < opts.samples; ++i) run_one(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < opts.samples; i += workers) run_one(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace ccm
