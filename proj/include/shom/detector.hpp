#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "interference.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace shom {

/// Camera and source settings for one acquisition.
struct DetectionParams {
  double chi = 2.27e-4;  // pair probability per repetition
  double eta = 0.5;      // per-arm efficiency including detection
  double f_rep = 80e6;   // Hz
  double t_exp = 11e-6;  // s
  double dark_rate = 0.0;  // mean spurious clicks per region per frame
  std::uint64_t seed = 1;

  /// Experiment repetitions integrated on one frame.
  std::uint64_t repetitions() const { return static_cast<std::uint64_t>(std::llround(f_rep * t_exp)); }

  void validate() const {
    if (!(chi >= 0.0 && chi <= 1.0)) throw InvalidArgument("chi must lie in [0, 1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
    if (!(f_rep > 0.0) || !(t_exp > 0.0)) throw InvalidArgument("f_rep and t_exp must be positive");
    if (repetitions() < 1) throw InvalidArgument("f_rep * t_exp must round to at least 1 repetition");
    if (!(dark_rate >= 0.0)) throw InvalidArgument("dark rate must be non-negative");
  }

  /// Mean detected photons per frame over both regions, before pixel saturation.
  double expected_photons_per_frame() const {
    return 2.0 * static_cast<double>(repetitions()) * chi * eta + 2.0 * dark_rate;
  }

  bool operator==(const DetectionParams&) const = default;
};

enum class Port : std::uint8_t { plus = 0, minus = 1 };

struct DetectionEvent {
  std::uint16_t bin;
  Port port;

  bool operator==(const DetectionEvent&) const = default;
  auto operator<=>(const DetectionEvent& o) const {
    if (port != o.port) return port <=> o.port;
    return bin <=> o.bin;
  }
};

/// Binary occupancy per frame, stored sparsely: frame f owns
/// events[offsets[f], offsets[f + 1]), sorted by (port, bin) with no repeats.
class FrameBatch {
 public:
  FrameBatch(WavelengthGrid grid_p, WavelengthGrid grid_m)
      : grid_p_(grid_p), grid_m_(grid_m), offsets_{0} {}

  const WavelengthGrid& grid_plus() const noexcept { return grid_p_; }
  const WavelengthGrid& grid_minus() const noexcept { return grid_m_; }
  std::uint64_t n_frames() const noexcept { return offsets_.size() - 1; }
  std::uint64_t n_events() const noexcept { return events_.size(); }
  std::span<const DetectionEvent> events() const noexcept { return events_; }

  std::span<const DetectionEvent> frame(std::uint64_t f) const noexcept {
    return {events_.data() + offsets_[f], events_.data() + offsets_[f + 1]};
  }

  /// Appends one frame; the events are sorted, de-duplicated and bounds-checked.
  void push_frame(std::vector<DetectionEvent> frame_events) {
    std::sort(frame_events.begin(), frame_events.end());
    frame_events.erase(std::unique(frame_events.begin(), frame_events.end()), frame_events.end());
    for (const DetectionEvent& e : frame_events) {
      const std::size_t n = e.port == Port::plus ? grid_p_.size() : grid_m_.size();
      if (e.bin >= n) throw InvalidArgument("event bin outside the grid");
    }
    events_.insert(events_.end(), frame_events.begin(), frame_events.end());
    offsets_.push_back(events_.size());
  }

  void append(const FrameBatch& other) {
    const std::uint64_t base = events_.size();
    events_.insert(events_.end(), other.events_.begin(), other.events_.end());
    for (std::size_t f = 1; f < other.offsets_.size(); ++f) offsets_.push_back(base + other.offsets_[f]);
  }

  bool operator==(const FrameBatch&) const = default;

 private:
  WavelengthGrid grid_p_;
  WavelengthGrid grid_m_;
  std::vector<std::uint64_t> offsets_;
  std::vector<DetectionEvent> events_;
};

/// Everything the frame generator needs to know about a photon pair.
struct PairSource {
  CoincidenceMap coincidence;
  CoincidenceMap bunching;
  PortMarginals marginals;
};

/// Validates that the marginals agree with the maps' row/column sums to 1e-6
/// of their peak value.
inline PairSource make_pair_source(CoincidenceMap coincidence, CoincidenceMap bunching,
                                   PortMarginals marginals) {
  if (coincidence.kind != MapKind::probability || bunching.kind != MapKind::probability)
    throw InvalidArgument("pair source needs probability maps");
  if (coincidence.grid_p != coincidence.grid_m || bunching.grid_p != coincidence.grid_p ||
      bunching.grid_m != coincidence.grid_m)
    throw GridMismatch("pair source maps must share one square grid");
  const std::size_t n = coincidence.grid_p.size();
  if (marginals.plus.size() != n || marginals.minus.size() != n)
    throw InconsistentMarginals("marginal length differs from the map grid");
  const PortMarginals implied = port_marginals(coincidence, bunching);
  double peak = 0.0;
  for (double v : implied.plus) peak = std::max(peak, std::abs(v));
  for (double v : implied.minus) peak = std::max(peak, std::abs(v));
  const double tol = 1e-6 * std::max(peak, 1e-300);
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(implied.plus[k] - marginals.plus[k]) > tol ||
        std::abs(implied.minus[k] - marginals.minus[k]) > tol)
      throw InconsistentMarginals("port marginals disagree with the coincidence/bunching maps");
  return {std::move(coincidence), std::move(bunching), std::move(marginals)};
}

/// Pair source from an amplitude that already carries the signal phase.
inline PairSource pair_source(const JointSpectralAmplitude& jsa_with_phase) {
  return make_pair_source(coincidence_probability(jsa_with_phase), bunching_probability(jsa_with_phase),
                          port_marginals(jsa_with_phase));
}

/// Pair source from the fringe form, which admits visibility < 1.
inline PairSource pair_source_cosine(const JointSpectralAmplitude& jsa_unphased,
                                     const DispersionModel& model,
                                     const InterferenceSettings& settings = {}) {
  return make_pair_source(coincidence_probability_cosine(jsa_unphased, model, settings),
                          bunching_probability_cosine(jsa_unphased, model, settings),
                          port_marginals(jsa_unphased));
}

/// True when some bin expects more than one photon per frame.
inline bool occupancy_warning(const PairSource& source, const DetectionParams& params) {
  const double per_pair_port = static_cast<double>(params.repetitions()) * params.chi * params.eta;
  double peak = 0.0;
  for (double v : source.marginals.plus) peak = std::max(peak, v * source.coincidence.grid_p.step_nm());
  for (double v : source.marginals.minus) peak = std::max(peak, v * source.coincidence.grid_m.step_nm());
  return per_pair_port * peak > 1.0;
}

/// `paired` emits photon pairs; `uncorrelated` is a diagnostic generator that
/// draws the two regions independently from the port spectra at the same
/// mean rate, so its covariance is zero in expectation.
enum class Correlation { paired, uncorrelated };

namespace detail {

inline std::vector<double> flatten_weights(const CoincidenceMap& map) {
  std::vector<double> w(map.values.flat().begin(), map.values.flat().end());
  for (double& v : w) v = std::max(v, 0.0);
  return w;
}

}  // namespace detail

/// Monte Carlo camera frames. Per frame: Binomial(R, chi) pairs; each pair
/// lands across ports (coincidence map) or in one port (bunching map, port
/// chosen with probability 1/2); every photon survives with probability eta;
/// Poisson(dark_rate) uniform dark clicks per region; pixels saturate at one
/// click. Deterministic in params.seed regardless of thread count.
inline FrameBatch simulate_frames(const PairSource& source, const DetectionParams& params,
                                  std::uint64_t n_frames, Correlation mode = Correlation::paired) {
  params.validate();
  if (n_frames > 0xffffffffULL) throw InvalidArgument("frame count exceeds 32-bit frame index");
  const WavelengthGrid& gp = source.coincidence.grid_p;
  const WavelengthGrid& gm = source.coincidence.grid_m;
  if (gp.size() > 0xffff || gm.size() > 0xffff) throw InvalidArgument("grid exceeds 16-bit bin index");
  const std::size_t n_m = gm.size();
  const std::uint64_t reps = params.repetitions();

  const double p_coinc_mass = std::max(0.0, source.coincidence.sum());
  const double p_bunch_mass = std::max(0.0, source.bunching.sum());
  const double total_mass = p_coinc_mass + p_bunch_mass;
  if (!(total_mass > 0.0) && params.chi > 0.0) throw DegenerateMap("pair source carries no probability");
  const double p_coinc = total_mass > 0.0 ? p_coinc_mass / total_mass : 0.0;

  AliasTable coinc_table, bunch_table, plus_table, minus_table;
  if (p_coinc_mass > 0.0) coinc_table = AliasTable(detail::flatten_weights(source.coincidence));
  if (p_bunch_mass > 0.0) bunch_table = AliasTable(detail::flatten_weights(source.bunching));
  const CountSampler pair_count = CountSampler::binomial(reps, params.chi);
  const CountSampler single_count = CountSampler::binomial(reps, params.chi * params.eta);
  if (mode == Correlation::uncorrelated && !single_count.always_zero()) {
    plus_table = AliasTable(source.marginals.plus);
    minus_table = AliasTable(source.marginals.minus);
  }
  const CountSampler dark_count = CountSampler::poisson(params.dark_rate);

  auto simulate_one = [&](std::uint64_t f, std::vector<DetectionEvent>& out) {
    out.clear();
    StreamRng rng(params.seed, f);
    auto detect = [&](std::size_t bin, Port port) {
      if (rng.uniform() < params.eta) out.push_back({static_cast<std::uint16_t>(bin), port});
    };
    if (mode == Correlation::paired) {
      const std::uint64_t pairs = pair_count(rng);
      for (std::uint64_t k = 0; k < pairs; ++k) {
        if (rng.uniform() < p_coinc) {
          const std::size_t idx = coinc_table(rng);
          detect(idx / n_m, Port::plus);
          detect(idx % n_m, Port::minus);
        } else {
          const Port port = rng.uniform() < 0.5 ? Port::plus : Port::minus;
          const std::size_t idx = bunch_table(rng);
          detect(idx / n_m, port);
          detect(idx % n_m, port);
        }
      }
    } else {
      for (Port port : {Port::plus, Port::minus}) {
        const std::uint64_t k = single_count(rng);
        const AliasTable& table = port == Port::plus ? plus_table : minus_table;
        for (std::uint64_t i = 0; i < k; ++i)
          out.push_back({static_cast<std::uint16_t>(table(rng)), port});
      }
    }
    for (Port port : {Port::plus, Port::minus}) {
      const std::uint64_t k = dark_count(rng);
      const std::size_t n = port == Port::plus ? gp.size() : gm.size();
      for (std::uint64_t i = 0; i < k; ++i) out.push_back({static_cast<std::uint16_t>(rng.index(n)), port});
    }
  };

  constexpr std::size_t kChunk = 1 << 14;
  const std::size_t n_chunks = (n_frames + kChunk - 1) / kChunk;
  std::vector<FrameBatch> parts(n_chunks, FrameBatch(gp, gm));
  parallel_chunks(n_frames, kChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<DetectionEvent> scratch;
    for (std::size_t f = begin; f < end; ++f) {
      simulate_one(f, scratch);
      parts[c].push_frame(scratch);
    }
  });
  FrameBatch batch(gp, gm);
  for (const FrameBatch& part : parts) batch.append(part);
  return batch;
}

/// Integer histograms behind every frame estimator.
struct FrameCounts {
  WavelengthGrid grid_p;
  WavelengthGrid grid_m;
  std::uint64_t n_frames = 0;
  Matrix<std::uint64_t> pairs;  // frames with a click at (+a, -b)
  std::vector<std::uint64_t> plus;
  std::vector<std::uint64_t> minus;
};

inline FrameCounts count_frames(const FrameBatch& batch) {
  const std::size_t np = batch.grid_plus().size(), nm = batch.grid_minus().size();
  FrameCounts counts{batch.grid_plus(), batch.grid_minus(), batch.n_frames(), Matrix<std::uint64_t>(np, nm),
                     std::vector<std::uint64_t>(np, 0), std::vector<std::uint64_t>(nm, 0)};
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t n_chunks = (batch.n_frames() + kChunk - 1) / kChunk;
  std::vector<FrameCounts> partial(n_chunks, counts);
  parallel_chunks(batch.n_frames(), kChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    FrameCounts& p = partial[c];
    for (std::size_t f = begin; f < end; ++f) {
      const auto events = batch.frame(f);
      const auto split = std::find_if(events.begin(), events.end(),
                                      [](const DetectionEvent& e) { return e.port == Port::minus; });
      for (auto it = events.begin(); it != split; ++it) {
        ++p.plus[it->bin];
        for (auto jt = split; jt != events.end(); ++jt) ++p.pairs(it->bin, jt->bin);
      }
      for (auto jt = split; jt != events.end(); ++jt) ++p.minus[jt->bin];
    }
  });
  for (const FrameCounts& p : partial) {
    for (std::size_t i = 0; i < counts.pairs.size(); ++i) counts.pairs.flat()[i] += p.pairs.flat()[i];
    for (std::size_t i = 0; i < np; ++i) counts.plus[i] += p.plus[i];
    for (std::size_t i = 0; i < nm; ++i) counts.minus[i] += p.minus[i];
  }
  return counts;
}

/// Below this many frames an estimate is flagged as low-statistics.
inline constexpr std::uint64_t kLowStatisticsFrames = 100;

inline bool low_statistics(const CoincidenceMap& map) {
  return map.kind != MapKind::probability && map.n_frames < kLowStatisticsFrames;
}

namespace detail {

inline CoincidenceMap estimate_map(const FrameCounts& counts, MapKind kind) {
  if (counts.n_frames == 0) throw EmptyBatch("frame batch is empty");
  return {counts.grid_p, counts.grid_m, Matrix<double>(counts.grid_p.size(), counts.grid_m.size()), kind,
          counts.n_frames};
}

}  // namespace detail

/// R(+,-) = <n(+) n(-)>.
inline CoincidenceMap raw_coincidences(const FrameCounts& counts) {
  CoincidenceMap out = detail::estimate_map(counts, MapKind::raw);
  const double inv = 1.0 / static_cast<double>(counts.n_frames);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values.flat()[i] = static_cast<double>(counts.pairs.flat()[i]) * inv;
  return out;
}

/// A(+,-) = <n(+)> <n(-)>.
inline CoincidenceMap accidental_map(const FrameCounts& counts) {
  CoincidenceMap out = detail::estimate_map(counts, MapKind::accidental);
  const double inv = 1.0 / static_cast<double>(counts.n_frames);
  for (std::size_t a = 0; a < counts.plus.size(); ++a)
    for (std::size_t b = 0; b < counts.minus.size(); ++b)
      out.values(a, b) = (static_cast<double>(counts.plus[a]) * inv) * (static_cast<double>(counts.minus[b]) * inv);
  return out;
}

/// C = R - A, the photon-number covariance.
inline CoincidenceMap covariance_map(const FrameCounts& counts) {
  const CoincidenceMap raw = raw_coincidences(counts);
  const CoincidenceMap acc = accidental_map(counts);
  CoincidenceMap out = detail::estimate_map(counts, MapKind::covariance);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values.flat()[i] = raw.values.flat()[i] - acc.values.flat()[i];
  return out;
}

inline CoincidenceMap raw_coincidences(const FrameBatch& batch) { return raw_coincidences(count_frames(batch)); }
inline CoincidenceMap accidental_map(const FrameBatch& batch) { return accidental_map(count_frames(batch)); }
inline CoincidenceMap covariance_map(const FrameBatch& batch) { return covariance_map(count_frames(batch)); }

/// Mean clicks per frame over both regions.
inline double mean_photons_per_frame(const FrameBatch& batch) {
  if (batch.n_frames() == 0) return 0.0;
  return static_cast<double>(batch.n_events()) / static_cast<double>(batch.n_frames());
}

}  // namespace shom
