#include "tcd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "tcd/numeric.hpp"
#include "tcd/rng.hpp"

namespace tcd {

namespace {

constexpr std::uint64_t kEventsPerBlock = 65536;

struct EventBranch {
  double probability = 0.0;
  Complex amp_r1l2, amp_r2l1;  // normalized two-particle branch state
  bool scattered = false;
  bool near_record = false;
};

std::vector<EventBranch> event_branches(const EnvironmentModel& model) {
  const IntensityMixture m = as_mixture(model);
  const PartialWhichPath p = m.which_path.value_or(PartialWhichPath::small_wavelength());
  if (std::abs((p.near_amp * std::conj(p.far_amp)).imag()) > 1e-12) {
    throw SamplingError(
        "sample_events: record-stage branch split needs a real relative phase between n and m");
  }

  const double s2 = std::sqrt(2.0);
  const double norm_total = std::norm(p.near_amp) + std::norm(p.far_amp);  // 1/2
  std::vector<EventBranch> branches;
  if (m.w1 > 0.0) {
    const double p_near = std::norm(p.near_amp) / norm_total;
    branches.push_back({m.w1 * p_near, s2 * p.near_amp, s2 * p.far_amp, true, true});
    branches.push_back({m.w1 * (1.0 - p_near), s2 * p.far_amp, s2 * p.near_amp, true, false});
  }
  if (m.w2() > 0.0) {
    const double r = 1.0 / s2;
    branches.push_back({m.w2(), Complex(r), Complex(r), false, false});
  }
  std::erase_if(branches, [](const EventBranch& b) { return b.probability <= 0.0; });
  return branches;
}

struct BinSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t bins = 0;

  std::size_t bin_of(double dy) const {
    const double t = (dy - lo) / (hi - lo) * static_cast<double>(bins);
    const auto b = static_cast<std::ptrdiff_t>(t);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        b, 0, static_cast<std::ptrdiff_t>(bins) - 1));
  }

  std::vector<double> edges() const {
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
      e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    e.back() = hi;
    return e;
  }
};

BinSpec make_bin_spec(const SampleConfig& cfg, const ScreenGrid& grid_a,
                      const ScreenGrid& grid_b) {
  BinSpec spec;
  spec.bins = cfg.bins;
  if (cfg.has_delta_range()) {
    spec.lo = cfg.delta_y_min;
    spec.hi = cfg.delta_y_max;
  } else {
    spec.lo = grid_a.y_min - grid_b.y_max;
    spec.hi = grid_a.y_max - grid_b.y_min;
  }
  // Cell centers sit strictly inside the grid ranges, so the default range
  // always covers them; a user-supplied range must do the same.
  if (spec.lo > grid_a.y_min - grid_b.y_max || spec.hi < grid_a.y_max - grid_b.y_min) {
    throw SamplingError("sample_events: dy histogram range does not cover the sampling grid");
  }
  return spec;
}

// Flattened conditional CDF of one branch over the cell grid.
std::vector<double> branch_cdf(const EventBranch& branch, const Geometry& g, AmplitudeMode mode,
                               const std::vector<double>& ca, const std::vector<double>& cb) {
  const std::size_t res_b = cb.size();
  std::vector<Complex> a1(ca.size()), a2(ca.size()), b1(cb.size()), b2(cb.size());
  for (std::size_t i = 0; i < ca.size(); ++i) {
    a1[i] = slit_amplitude(g, mode, 1, ca[i]);
    a2[i] = slit_amplitude(g, mode, 2, ca[i]);
  }
  for (std::size_t j = 0; j < cb.size(); ++j) {
    b1[j] = slit_amplitude(g, mode, 1, cb[j]);
    b2[j] = slit_amplitude(g, mode, 2, cb[j]);
  }
  std::vector<double> cdf(ca.size() * res_b);
  double running = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    for (std::size_t j = 0; j < res_b; ++j) {
      const Complex amp = branch.amp_r1l2 * a1[i] * b2[j] + branch.amp_r2l1 * a2[i] * b1[j];
      running += std::norm(amp);
      cdf[i * res_b + j] = running;
    }
  }
  if (!(running > 0.0)) {
    throw SamplingError("sample_events: conditional density is identically zero");
  }
  for (double& c : cdf) c /= running;
  cdf.back() = 1.0;
  return cdf;
}

}  // namespace

void SampleConfig::validate() const {
  if (samples < 1) throw ValidationError("montecarlo: need at least one sample");
  if (bins < 2) throw ValidationError("montecarlo: need at least two bins");
  if (resolution < 2) throw ValidationError("montecarlo: need at least two cells per axis");
  if ((delta_y_min != 0.0 || delta_y_max != 0.0) && !(delta_y_min < delta_y_max)) {
    throw ValidationError("montecarlo: empty dy range");
  }
}

std::vector<double> sampling_cell_centers(const ScreenGrid& grid, std::size_t resolution) {
  std::vector<double> centers(resolution);
  const double h = grid.span() / static_cast<double>(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    centers[i] = grid.y_min + (static_cast<double>(i) + 0.5) * h;
  }
  return centers;
}

SampleResult sample_events(const EnvironmentModel& model, const Geometry& g, AmplitudeMode mode,
                           const ScreenGrid& grid_a, const ScreenGrid& grid_b,
                           const SampleConfig& cfg, unsigned workers) {
  cfg.validate();
  if (workers < 1) throw ValidationError("sample_events: need at least one worker");

  const std::vector<double> ca = sampling_cell_centers(grid_a, cfg.resolution);
  const std::vector<double> cb = sampling_cell_centers(grid_b, cfg.resolution);
  const BinSpec spec = make_bin_spec(cfg, grid_a, grid_b);

  const std::vector<EventBranch> branches = event_branches(model);
  std::vector<std::vector<double>> cdfs;
  cdfs.reserve(branches.size());
  for (const EventBranch& b : branches) cdfs.push_back(branch_cdf(b, g, mode, ca, cb));

  const std::size_t res_b = cb.size();
  const std::uint64_t blocks = (cfg.samples + kEventsPerBlock - 1) / kEventsPerBlock;

  std::vector<std::uint64_t> counts(cfg.bins, 0);
  std::vector<std::uint64_t> cells(cfg.collect_2d ? ca.size() * res_b : 0, 0);
  SampleStats stats;
  std::atomic<std::uint64_t> next_block{0};
  std::mutex merge_mutex;

  auto run_worker = [&]() {
    std::vector<std::uint64_t> local_counts(cfg.bins, 0);
    std::vector<std::uint64_t> local_cells(cells.size(), 0);
    SampleStats local_stats;
    for (;;) {
      const std::uint64_t block = next_block.fetch_add(1);
      if (block >= blocks) break;
      SplitMix64 rng = SplitMix64::substream(cfg.seed, block);
      const std::uint64_t begin = block * kEventsPerBlock;
      const std::uint64_t end = std::min(cfg.samples, begin + kEventsPerBlock);
      for (std::uint64_t e = begin; e < end; ++e) {
        // Fixed two-draw schedule per event keeps blocks reproducible.
        const double u_branch = rng.next_double();
        const double u_cell = rng.next_double();
        std::size_t chosen = branches.size() - 1;
        double acc = 0.0;
        for (std::size_t b = 0; b < branches.size(); ++b) {
          acc += branches[b].probability;
          if (u_branch < acc) {
            chosen = b;
            break;
          }
        }
        const std::vector<double>& cdf = cdfs[chosen];
        const std::size_t cell = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u_cell) - cdf.begin());
        const std::size_t i = cell / res_b;
        const std::size_t j = cell % res_b;
        local_counts[spec.bin_of(ca[i] - cb[j])]++;
        if (branches[chosen].scattered) {
          local_stats.scattered++;
          if (branches[chosen].near_record) local_stats.near_records++;
        }
        if (!local_cells.empty()) local_cells[cell]++;
      }
    }
    const std::lock_guard<std::mutex> lock(merge_mutex);
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local_counts[i];
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += local_cells[i];
    stats.scattered += local_stats.scattered;
    stats.near_records += local_stats.near_records;
  };

  if (workers == 1) {
    run_worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_worker);
    for (std::thread& t : pool) t.join();
  }

  SampleResult result;
  result.histogram = Histogram{spec.edges(), std::move(counts), cfg.samples};
  result.stats = stats;
  result.cell_counts = std::move(cells);
  return result;
}

DeltaProfile analytic_delta_profile(const EnvironmentModel& model, const Geometry& g,
                                    AmplitudeMode mode, const ScreenGrid& grid_a,
                                    const ScreenGrid& grid_b, const SampleConfig& cfg) {
  cfg.validate();
  const std::vector<double> ca = sampling_cell_centers(grid_a, cfg.resolution);
  const std::vector<double> cb = sampling_cell_centers(grid_b, cfg.resolution);
  const BinSpec spec = make_bin_spec(cfg, grid_a, grid_b);

  const std::vector<double> density =
      joint_density_values(reduced_density(model), g, mode, ca, cb);
  const double total = compensated_total(density);
  if (!(total > 0.0)) throw SamplingError("analytic_delta_profile: zero density");

  std::vector<CompensatedSum> bins(cfg.bins);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    for (std::size_t j = 0; j < cb.size(); ++j) {
      bins[spec.bin_of(ca[i] - cb[j])].add(density[i * cb.size() + j] / total);
    }
  }
  DeltaProfile profile;
  profile.edges = spec.edges();
  profile.probs.resize(cfg.bins);
  for (std::size_t b = 0; b < cfg.bins; ++b) profile.probs[b] = bins[b].value();
  return profile;
}

namespace {

void require_matching_edges(const Histogram& h, const DeltaProfile& analytic) {
  if (h.edges.size() != analytic.edges.size() || h.counts.size() != analytic.probs.size()) {
    throw SamplingError("histogram and analytic profile have different binnings");
  }
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    if (h.edges[i] != analytic.edges[i]) {
      throw SamplingError("histogram and analytic profile have different bin edges");
    }
  }
}

}  // namespace

double tv_distance(const Histogram& h, const DeltaProfile& analytic) {
  require_matching_edges(h, analytic);
  if (h.total == 0) throw SamplingError("tv_distance: empty histogram");
  CompensatedSum s;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double p = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
    s.add(std::abs(p - analytic.probs[i]));
  }
  return 0.5 * s.value();
}

Chi2Result chi2_statistic(const Histogram& h, const DeltaProfile& analytic) {
  require_matching_edges(h, analytic);
  if (h.total == 0) throw SamplingError("chi2_statistic: empty histogram");

  // Merge adjacent bins left to right until each group expects >= 5 events;
  // a short tail folds into the previous group.
  std::vector<double> exp_merged;
  std::vector<double> obs_merged;
  double exp_acc = 0.0, obs_acc = 0.0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    exp_acc += analytic.probs[i] * static_cast<double>(h.total);
    obs_acc += static_cast<double>(h.counts[i]);
    if (exp_acc >= 5.0) {
      exp_merged.push_back(exp_acc);
      obs_merged.push_back(obs_acc);
      exp_acc = obs_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (exp_merged.empty()) {
      exp_merged.push_back(exp_acc);
      obs_merged.push_back(obs_acc);
    } else {
      exp_merged.back() += exp_acc;
      obs_merged.back() += obs_acc;
    }
  }

  Chi2Result result;
  if (exp_merged.size() < 2) {
    result.degenerate = true;
    return result;
  }
  CompensatedSum stat;
  for (std::size_t i = 0; i < exp_merged.size(); ++i) {
    const double d = obs_merged[i] - exp_merged[i];
    stat.add(d * d / exp_merged[i]);
  }
  result.statistic = stat.value();
  result.dof = exp_merged.size() - 1;
  return result;
}

}  // namespace tcd
