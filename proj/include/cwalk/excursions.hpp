#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "cwalk/errors.hpp"
#include "cwalk/kernel.hpp"
#include "cwalk/lattice.hpp"
#include "cwalk/range_stats.hpp"
#include "cwalk/rng.hpp"
#include "cwalk/walk.hpp"

namespace cwalk {

/// Annuli between B(n ln n) and B(n ln^2 n).
struct AnnulusSpec {
  double n = 0.0;
  double r_in = 0.0;
  double r_out = 0.0;

  /// Throws std::invalid_argument for n < 16.
  static AnnulusSpec for_scale(double n);
};

struct Excursion {
  LatticePoint start;  // on the internal boundary of B(r_in)
  LatticePoint end;    // first site beyond r_out
  std::uint64_t steps = 0;
  std::uint64_t jumps = 0;
  /// Watched sites first visited during this excursion.
  std::size_t new_watched = 0;
  /// Filled when ExcursionOptions::record_visited is set.
  std::optional<std::unordered_set<LatticePoint, LatticePointHash>> visited;
  /// Filled when ExcursionOptions::record_paths is set.
  std::optional<Trajectory> path;
};

enum class ChainMode { kDirect, kPaperFaithful };

std::string_view chain_mode_name(ChainMode mode);

/// Which escape probability drives the geometric count in paper_faithful mode
/// and the coupled count in direct mode.
enum class PsiSource { kLeading, kExact };

struct ExcursionOptions {
  ChainMode mode = ChainMode::kDirect;
  PsiSource psi = PsiSource::kLeading;
  /// Distant-jump acceleration inside excursions. Re-entry always uses it.
  bool fast = true;
  const SiteIndex* watch = nullptr;
  bool record_visited = false;
  bool record_paths = false;
  /// paper_faithful only: generate exactly this many excursions instead of a
  /// geometric number.
  std::optional<std::int64_t> forced_count;
  std::int64_t max_excursions = 100'000;
  std::size_t max_recorded_sites = 50'000'000;
  std::uint64_t segment_step_cap = 4'000'000'000ULL;
  ReentryOptions reentry{};
};

struct ExcursionChain {
  AnnulusSpec spec;
  ChainMode mode = ChainMode::kDirect;
  LatticePoint start;
  /// Initial piece: start until the internal boundary of B(r_in).
  Excursion initial_piece;
  std::vector<Excursion> excursions;
  std::int64_t count = 0;
  /// Resolver decisions, one per completed excursion (direct mode).
  std::vector<DecisionRecord> decisions;
  /// Last decision; never_returns is true in direct mode.
  std::optional<DecisionRecord> resolved_tail;
  /// Geometric count: the drawn value in paper_faithful mode, the value
  /// coupled to the resolver uniforms in direct mode.
  std::int64_t hat_count = 0;
  double psi_used = 0.0;
  /// Total rejection restarts and the largest recorded re-entry bias.
  std::uint64_t reentry_rejections = 0;
  double reentry_bias = 0.0;
  /// Vacant fraction of the watched set after the initial piece and after
  /// each excursion (empty without a watch set).
  CoverageCurve coverage;
};

/// Thrown when a resource cap stops a chain; carries the partial chain.
class ChainResourceError : public ResourceError {
 public:
  ChainResourceError(const std::string& what, ExcursionChain partial)
      : ResourceError(what), partial_(std::move(partial)) {}
  const ExcursionChain& partial() const { return partial_; }

 private:
  ExcursionChain partial_;
};

/// Requires start != origin and |start| < r_in.
ExcursionChain sample_excursion_chain(const PotentialKernel& kernel, const AnnulusSpec& spec,
                                      LatticePoint start, RandomSource& rng,
                                      const ExcursionOptions& options = {});

/// psi value selected by the source.
double psi_value(double n, PsiSource source);

/// One JSON object per excursion (initial piece first, index 0):
/// index, start, end, steps, distinct_sites (null when not recorded).
void write_chain_jsonl(std::ostream& out, const ExcursionChain& chain);

struct EntranceMeasure {
  std::vector<LatticePoint> support;
  std::vector<double> masses;
};

/// Normalized histogram of samples, all of which must lie on the internal
/// boundary of ball.
EntranceMeasure empirical_entrance_measure(std::span<const LatticePoint> samples, const Ball& ball);

/// kCouple * lnln n / (n ln n) / psi_exact(n): budget for P[N != N_hat] and
/// for the TV distance between direct and paper_faithful counts.
double coupling_error_budget(double n);

}  // namespace cwalk
