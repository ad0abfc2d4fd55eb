#pragma once

#include <cstdint>
#include <vector>

#include "tcd/channels.hpp"
#include "tcd/geometry.hpp"
#include "tcd/observables.hpp"

namespace tcd {

struct SampleConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::size_t bins = 64;
  // Histogram range over dy = ya - yb.  Left at (0, 0) it defaults to the
  // full range reachable from the screen grids.
  double delta_y_min = 0.0;
  double delta_y_max = 0.0;
  std::size_t resolution = 512;  // sampling cells per screen axis
  bool collect_2d = false;       // additionally count (ya, yb) cells

  bool has_delta_range() const { return delta_y_min < delta_y_max; }
  void validate() const;
};

struct Histogram {
  std::vector<double> edges;          // bins + 1, strictly increasing
  std::vector<std::uint64_t> counts;  // bins
  std::uint64_t total = 0;
};

// Analytic per-bin probabilities over the same dy binning, aggregated from
// the engine's joint density on the sampler's cell grid.
struct DeltaProfile {
  std::vector<double> edges;
  std::vector<double> probs;  // unit sum
};

struct SampleStats {
  std::uint64_t scattered = 0;     // events that took a scattering branch
  std::uint64_t near_records = 0;  // scattered events recorded by the nearer detector
};

struct SampleResult {
  Histogram histogram;
  SampleStats stats;
  std::vector<std::uint64_t> cell_counts;  // resolution^2 (row-major ya), when collect_2d
};

/**
 * Stochastic oracle for the coincidence statistics.  Each event first picks
 * a classical branch (scatter / no-scatter with (w1, w2); when scattered,
 * the detector record with odds |n|^2 : |m|^2), then draws a position pair
 * from that branch's conditional joint density by inverse CDF on the
 * discretized cell grid.  Fixed seed gives bit-identical histograms for any
 * worker count: events are generated in fixed-size blocks with one RNG
 * substream per block, and merging is plain integer addition.
 *
 * The record-stage split requires a real relative phase between n and m
 * (SamplingError otherwise); with that, the two record branches share one
 * conditional density and the mixture reproduces the engine's joint density.
 */
SampleResult sample_events(const EnvironmentModel& model, const Geometry& g, AmplitudeMode mode,
                           const ScreenGrid& grid_a, const ScreenGrid& grid_b,
                           const SampleConfig& cfg, unsigned workers = 1);

DeltaProfile analytic_delta_profile(const EnvironmentModel& model, const Geometry& g,
                                    AmplitudeMode mode, const ScreenGrid& grid_a,
                                    const ScreenGrid& grid_b, const SampleConfig& cfg);

// Total-variation distance (1/2) sum |p_i - q_i| between the normalized
// histogram and the analytic prediction; SamplingError on edge mismatch.
double tv_distance(const Histogram& h, const DeltaProfile& analytic);

struct Chi2Result {
  double statistic = 0.0;
  std::size_t dof = 0;
  bool degenerate = false;  // fewer than two merged bins
};

// Pearson chi^2 with adjacent bins merged until every expected count is at
// least 5; dof = merged bins - 1.
Chi2Result chi2_statistic(const Histogram& h, const DeltaProfile& analytic);

// Cell-center coordinates used for position sampling: `resolution` equal
// cells tiling [y_min, y_max].
std::vector<double> sampling_cell_centers(const ScreenGrid& grid, std::size_t resolution);

}  // namespace tcd
