#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pollinet/fenwick.hpp"
#include "pollinet/mean_field.hpp"
#include "pollinet/network.hpp"
#include "pollinet/rates.hpp"
#include "pollinet/rng.hpp"
#include "pollinet/trajectory.hpp"

namespace pollinet {

/// State of the stochastic individual-based model: integer counts scaled by
/// the carrying capacity K.
struct IbmState {
    double t = 0.0;
    int K = 1;
    std::vector<long long> plants;
    std::vector<long long> polls;
};

enum class EventKind { PlantBirth, PlantDeath, PollBirth, PollDeath };

struct Event {
    EventKind kind;
    int index;
    double dt;
};

struct PerSpeciesRates {
    std::vector<double> plant_birth, plant_death;  // death includes competition
    std::vector<double> poll_birth, poll_death;
    double total = 0.0;
};

/// Rates recomputed from scratch:
///   plant i birth: b^P(R_i) P_i, death: [d^P(R_i) + (1/(nK)) sum_l k(x_i,x_l) P_l] P_i
/// with R_i = sum_{j~i} C_ij A_j / K; pollinator side mirrored.
PerSpeciesRates event_rates(const IbmState& state, const Community& community, const RateParams& params,
                            const Kernels& kernels);

/// Direct-method Gillespie engine. Holding times are Exponential(total rate);
/// the event is drawn by class (birth/death x side, competition split off)
/// and then within class through a Fenwick tree, so selection is O(log).
/// Per-event cache updates touch only the event's neighborhood; caches are
/// resynchronized from scratch every `resync_every` events.
class GillespieEngine {
  public:
    GillespieEngine(const Community& community, const RateParams& params, const Kernels& kernels, int K,
                    std::vector<long long> init_plants, std::vector<long long> init_polls,
                    long long resync_every = 10'000);

    const IbmState& state() const { return state_; }
    long long events() const { return events_; }
    double total_rate() const;

    /// One event; nullopt when the total rate is zero (absorbed at zero).
    std::optional<Event> step(Pcg64& rng);

    /// Cached per-species rates (for tests and diagnostics).
    PerSpeciesRates cached_rates() const;

    /// Max relative deviation between cached and freshly recomputed rates.
    double cache_deviation() const;

    void resync();

  private:
    void apply_plant_delta(int i, int delta);
    void apply_poll_delta(int j, int delta);
    void refresh_plant_leaves(int i);
    void refresh_poll_leaves(int j);
    double plant_comp_total() const;
    double poll_comp_total() const;

    const Community& community_;
    RateParams params_;
    Kernels kernels_;
    IbmState state_;
    long long resync_every_;
    long long events_ = 0;
    long long since_resync_ = 0;

    // incremental caches
    std::vector<double> raw_res_p_;  // sum_{j~i} C_ij A_j (divide by K for R)
    std::vector<double> raw_res_a_;
    std::vector<double> comp_p_, comp_a_;  // per-species competition (empty when kernel constant)
    double sum_p_ = 0.0, sum_a_ = 0.0;

    FenwickTree plant_birth_, plant_intrinsic_death_, plant_counts_, plant_comp_death_;
    FenwickTree poll_birth_, poll_intrinsic_death_, poll_counts_, poll_comp_death_;
};

enum class SimStatus { Completed, AbsorbedAtZero, RuntimeBudgetExceeded };

struct SimOptions {
    long long event_cap = 100'000'000;
    long long resync_every = 10'000;
};

struct SimResult {
    Trajectory trajectory;  // values are counts / K
    SimStatus status = SimStatus::Completed;
    long long events = 0;
};

/// Exact sample path recorded at `record_times` (state held constant between
/// events). Deterministic given (community, seed, replica).
SimResult simulate(const Community& community, const RateParams& params, const Kernels& kernels, int K,
                   const std::vector<long long>& init_plants, const std::vector<long long>& init_polls, double t_end,
                   const std::vector<double>& record_times, std::uint64_t seed, std::uint64_t replica = 0,
                   const SimOptions& options = {});

/// Independent replicas (sub-stream per replica), optionally run on several
/// threads; results are ordered by replica index regardless of scheduling.
std::vector<SimResult> simulate_replicas(const Community& community, const RateParams& params, const Kernels& kernels,
                                         int K, const std::vector<long long>& init_plants,
                                         const std::vector<long long>& init_polls, double t_end,
                                         const std::vector<double>& record_times, std::uint64_t seed, int replicas,
                                         int jobs = 1, const SimOptions& options = {});

}  // namespace pollinet
