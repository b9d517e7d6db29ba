#include "pollinet/gillespie.hpp"

#include <cmath>
#include <stdexcept>

#include "pollinet/runner.hpp"

namespace pollinet {

namespace {
std::vector<double> to_double(const std::vector<long long>& v) {
    return {v.begin(), v.end()};
}
}  // namespace

PerSpeciesRates event_rates(const IbmState& state, const Community& community, const RateParams& params,
                            const Kernels& kernels) {
    const int n = community.n, m = community.m;
    if (state.plants.size() != static_cast<std::size_t>(n) || state.polls.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("event_rates: state does not match community");
    const double K = static_cast<double>(state.K);
    const auto P = to_double(state.plants);
    const auto A = to_double(state.polls);
    const auto res_p = resources_plants(community, A, K);
    const auto res_a = resources_pollinators(community, P, K);
    const auto comp_p = competition(kernels.plant, community.x, P);
    const auto comp_a = competition(kernels.poll, community.y, A);

    PerSpeciesRates rates;
    rates.plant_birth.resize(n);
    rates.plant_death.resize(n);
    rates.poll_birth.resize(m);
    rates.poll_death.resize(m);
    for (int i = 0; i < n; ++i) {
        rates.plant_birth[i] = birth_p(params, res_p[i]) * P[i];
        rates.plant_death[i] = (death_p(params, res_p[i]) + comp_p[i] / K) * P[i];
        rates.total += rates.plant_birth[i] + rates.plant_death[i];
    }
    for (int j = 0; j < m; ++j) {
        rates.poll_birth[j] = birth_a(params, res_a[j]) * A[j];
        rates.poll_death[j] = (death_a(params, res_a[j]) + comp_a[j] / K) * A[j];
        rates.total += rates.poll_birth[j] + rates.poll_death[j];
    }
    return rates;
}

GillespieEngine::GillespieEngine(const Community& community, const RateParams& params, const Kernels& kernels, int K,
                                 std::vector<long long> init_plants, std::vector<long long> init_polls,
                                 long long resync_every)
    : community_(community), params_(params), kernels_(kernels), resync_every_(resync_every) {
    params_.validate();
    if (K < 1) throw std::invalid_argument("gillespie: K must be >= 1");
    if (init_plants.size() != static_cast<std::size_t>(community.n) ||
        init_polls.size() != static_cast<std::size_t>(community.m))
        throw std::invalid_argument("gillespie: initial counts do not match community");
    for (long long c : init_plants)
        if (c < 0) throw std::invalid_argument("gillespie: negative initial count");
    for (long long c : init_polls)
        if (c < 0) throw std::invalid_argument("gillespie: negative initial count");

    state_.t = 0.0;
    state_.K = K;
    state_.plants = std::move(init_plants);
    state_.polls = std::move(init_polls);

    const int n = community.n, m = community.m;
    plant_birth_.assign(n);
    plant_intrinsic_death_.assign(n);
    plant_counts_.assign(n);
    poll_birth_.assign(m);
    poll_intrinsic_death_.assign(m);
    poll_counts_.assign(m);
    if (!kernels_.plant.is_constant()) plant_comp_death_.assign(n);
    if (!kernels_.poll.is_constant()) poll_comp_death_.assign(m);
    resync();
}

void GillespieEngine::resync() {
    const int n = community_.n, m = community_.m;
    const double K = static_cast<double>(state_.K);
    sum_p_ = 0.0;
    sum_a_ = 0.0;
    for (long long c : state_.plants) sum_p_ += static_cast<double>(c);
    for (long long c : state_.polls) sum_a_ += static_cast<double>(c);

    raw_res_p_.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j : community_.plant_neighbors[i])
            raw_res_p_[i] += community_.weight(i, j) * static_cast<double>(state_.polls[j]);
    raw_res_a_.assign(m, 0.0);
    for (int j = 0; j < m; ++j)
        for (int i : community_.poll_neighbors[j])
            raw_res_a_[j] += community_.weight(i, j) * static_cast<double>(state_.plants[i]);

    if (!kernels_.plant.is_constant()) {
        comp_p_.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int l = 0; l < n; ++l)
                s += kernels_.plant(community_.x[i], community_.x[l]) * static_cast<double>(state_.plants[l]);
            comp_p_[i] = s / (static_cast<double>(n) * K);
        }
    }
    if (!kernels_.poll.is_constant()) {
        comp_a_.assign(m, 0.0);
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int l = 0; l < m; ++l)
                s += kernels_.poll(community_.y[j], community_.y[l]) * static_cast<double>(state_.polls[l]);
            comp_a_[j] = s / (static_cast<double>(m) * K);
        }
    }

    for (int i = 0; i < n; ++i) refresh_plant_leaves(i);
    for (int j = 0; j < m; ++j) refresh_poll_leaves(j);
    since_resync_ = 0;
}

void GillespieEngine::refresh_plant_leaves(int i) {
    const double K = static_cast<double>(state_.K);
    const double p = static_cast<double>(state_.plants[i]);
    // incremental sums can drift a hair below zero once counts empty out
    const double r = std::max(0.0, raw_res_p_[i]) / K;
    plant_birth_.set(i, birth_p(params_, r) * p);
    plant_intrinsic_death_.set(i, death_p(params_, r) * p);
    plant_counts_.set(i, p);
    if (!kernels_.plant.is_constant()) plant_comp_death_.set(i, std::max(0.0, comp_p_[i]) * p);
}

void GillespieEngine::refresh_poll_leaves(int j) {
    const double K = static_cast<double>(state_.K);
    const double a = static_cast<double>(state_.polls[j]);
    const double r = std::max(0.0, raw_res_a_[j]) / K;
    poll_birth_.set(j, birth_a(params_, r) * a);
    poll_intrinsic_death_.set(j, death_a(params_, r) * a);
    poll_counts_.set(j, a);
    if (!kernels_.poll.is_constant()) poll_comp_death_.set(j, std::max(0.0, comp_a_[j]) * a);
}

double GillespieEngine::plant_comp_total() const {
    if (kernels_.plant.is_constant()) {
        const double n = static_cast<double>(community_.n);
        return kernels_.plant.constant_value() * sum_p_ * sum_p_ / (n * static_cast<double>(state_.K));
    }
    return plant_comp_death_.total();
}

double GillespieEngine::poll_comp_total() const {
    if (kernels_.poll.is_constant()) {
        const double m = static_cast<double>(community_.m);
        return kernels_.poll.constant_value() * sum_a_ * sum_a_ / (m * static_cast<double>(state_.K));
    }
    return poll_comp_death_.total();
}

double GillespieEngine::total_rate() const {
    return plant_birth_.total() + plant_intrinsic_death_.total() + plant_comp_total() + poll_birth_.total() +
           poll_intrinsic_death_.total() + poll_comp_total();
}

void GillespieEngine::apply_plant_delta(int i, int delta) {
    state_.plants[i] += delta;
    sum_p_ += delta;
    refresh_plant_leaves(i);
    for (int j : community_.plant_neighbors[i]) {
        raw_res_a_[j] += delta * community_.weight(i, j);
        refresh_poll_leaves(j);
    }
    if (!kernels_.plant.is_constant()) {
        const double scale = delta / (static_cast<double>(community_.n) * static_cast<double>(state_.K));
        for (int l = 0; l < community_.n; ++l) {
            comp_p_[l] += kernels_.plant(community_.x[l], community_.x[i]) * scale;
            plant_comp_death_.set(l, comp_p_[l] * static_cast<double>(state_.plants[l]));
        }
    }
}

void GillespieEngine::apply_poll_delta(int j, int delta) {
    state_.polls[j] += delta;
    sum_a_ += delta;
    refresh_poll_leaves(j);
    for (int i : community_.poll_neighbors[j]) {
        raw_res_p_[i] += delta * community_.weight(i, j);
        refresh_plant_leaves(i);
    }
    if (!kernels_.poll.is_constant()) {
        const double scale = delta / (static_cast<double>(community_.m) * static_cast<double>(state_.K));
        for (int l = 0; l < community_.m; ++l) {
            comp_a_[l] += kernels_.poll(community_.y[l], community_.y[j]) * scale;
            poll_comp_death_.set(l, comp_a_[l] * static_cast<double>(state_.polls[l]));
        }
    }
}

std::optional<Event> GillespieEngine::step(Pcg64& rng) {
    const double lambda = total_rate();
    if (!(lambda > 0.0)) return std::nullopt;

    const double dt = rng.exponential(lambda);
    double r = rng.uniform01() * lambda;

    // class order: plant birth, plant intrinsic death, plant competition
    // death, then the pollinator mirror
    Event ev{EventKind::PlantBirth, -1, dt};
    const double pb = plant_birth_.total();
    const double pd = plant_intrinsic_death_.total();
    const double pc = plant_comp_total();
    const double ab = poll_birth_.total();
    const double ad = poll_intrinsic_death_.total();

    if (r < pb) {
        ev.kind = EventKind::PlantBirth;
        ev.index = static_cast<int>(plant_birth_.select_positive(r));
        apply_plant_delta(ev.index, +1);
    } else if ((r -= pb) < pd) {
        ev.kind = EventKind::PlantDeath;
        ev.index = static_cast<int>(plant_intrinsic_death_.select_positive(r));
        apply_plant_delta(ev.index, -1);
    } else if ((r -= pd) < pc) {
        ev.kind = EventKind::PlantDeath;
        // within the competition class the victim is drawn proportionally to
        // its count when the kernel is constant
        ev.index = static_cast<int>(kernels_.plant.is_constant()
                                        ? plant_counts_.select_positive(std::min(r / pc, 1.0) * sum_p_)
                                        : plant_comp_death_.select_positive(r));
        apply_plant_delta(ev.index, -1);
    } else if ((r -= pc) < ab) {
        ev.kind = EventKind::PollBirth;
        ev.index = static_cast<int>(poll_birth_.select_positive(r));
        apply_poll_delta(ev.index, +1);
    } else if ((r -= ab) < ad) {
        ev.kind = EventKind::PollDeath;
        ev.index = static_cast<int>(poll_intrinsic_death_.select_positive(r));
        apply_poll_delta(ev.index, -1);
    } else {
        r -= ad;
        const double ac = poll_comp_total();
        ev.kind = EventKind::PollDeath;
        ev.index = static_cast<int>(kernels_.poll.is_constant()
                                        ? poll_counts_.select_positive(std::min(r / ac, 1.0) * sum_a_)
                                        : poll_comp_death_.select_positive(r));
        apply_poll_delta(ev.index, -1);
    }

    state_.t += dt;
    ++events_;
    if (++since_resync_ >= resync_every_) resync();
    return ev;
}

PerSpeciesRates GillespieEngine::cached_rates() const {
    PerSpeciesRates rates;
    const int n = community_.n, m = community_.m;
    rates.plant_birth.resize(n);
    rates.plant_death.resize(n);
    rates.poll_birth.resize(m);
    rates.poll_death.resize(m);
    const double K = static_cast<double>(state_.K);
    for (int i = 0; i < n; ++i) {
        rates.plant_birth[i] = plant_birth_.value(i);
        double comp = kernels_.plant.is_constant()
                          ? kernels_.plant.constant_value() * sum_p_ / (static_cast<double>(n) * K)
                          : comp_p_[i];
        rates.plant_death[i] = plant_intrinsic_death_.value(i) + comp * static_cast<double>(state_.plants[i]);
        rates.total += rates.plant_birth[i] + rates.plant_death[i];
    }
    for (int j = 0; j < m; ++j) {
        rates.poll_birth[j] = poll_birth_.value(j);
        double comp = kernels_.poll.is_constant()
                          ? kernels_.poll.constant_value() * sum_a_ / (static_cast<double>(m) * K)
                          : comp_a_[j];
        rates.poll_death[j] = poll_intrinsic_death_.value(j) + comp * static_cast<double>(state_.polls[j]);
        rates.total += rates.poll_birth[j] + rates.poll_death[j];
    }
    return rates;
}

double GillespieEngine::cache_deviation() const {
    const PerSpeciesRates fresh = event_rates(state_, community_, params_, kernels_);
    const PerSpeciesRates cached = cached_rates();
    double worst = 0.0;
    auto cmp = [&worst](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    };
    cmp(cached.plant_birth, fresh.plant_birth);
    cmp(cached.plant_death, fresh.plant_death);
    cmp(cached.poll_birth, fresh.poll_birth);
    cmp(cached.poll_death, fresh.poll_death);
    return worst;
}

SimResult simulate(const Community& community, const RateParams& params, const Kernels& kernels, int K,
                   const std::vector<long long>& init_plants, const std::vector<long long>& init_polls, double t_end,
                   const std::vector<double>& record_times, std::uint64_t seed, std::uint64_t replica,
                   const SimOptions& options) {
    if (!(t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be positive");
    for (std::size_t k = 1; k < record_times.size(); ++k)
        if (!(record_times[k] > record_times[k - 1]))
            throw std::invalid_argument("simulate: record times must be strictly increasing");

    GillespieEngine engine(community, params, kernels, K, init_plants, init_polls, options.resync_every);
    Pcg64 rng = make_rng(seed, Stream::Dynamics, replica);

    SimResult result;
    result.trajectory.scale = ScaleTag::IBM;
    result.trajectory.n = community.n;
    result.trajectory.m = community.m;
    result.trajectory.seed = seed;

    const double inv_k = 1.0 / static_cast<double>(K);
    auto snapshot = [&](const std::vector<long long>& plants, const std::vector<long long>& polls) {
        std::vector<double> row;
        row.reserve(plants.size() + polls.size());
        for (long long c : plants) row.push_back(static_cast<double>(c) * inv_k);
        for (long long c : polls) row.push_back(static_cast<double>(c) * inv_k);
        return row;
    };

    std::size_t next_rec = 0;
    // records at t = 0 see the initial state
    while (next_rec < record_times.size() && record_times[next_rec] <= 0.0) {
        result.trajectory.times.push_back(record_times[next_rec]);
        result.trajectory.values.push_back(snapshot(engine.state().plants, engine.state().polls));
        ++next_rec;
    }

    while (engine.state().t < t_end) {
        if (engine.events() >= options.event_cap) {
            result.status = SimStatus::RuntimeBudgetExceeded;
            break;
        }
        const std::optional<Event> ev = engine.step(rng);
        if (!ev) {
            // absorbed: the state never changes again
            while (next_rec < record_times.size() && record_times[next_rec] <= t_end) {
                result.trajectory.times.push_back(record_times[next_rec]);
                result.trajectory.values.push_back(snapshot(engine.state().plants, engine.state().polls));
                ++next_rec;
            }
            result.status = SimStatus::AbsorbedAtZero;
            break;
        }
        const double t_new = engine.state().t;
        if (next_rec < record_times.size() && record_times[next_rec] < t_new) {
            // reconstruct the pre-event counts: one coordinate moved by +-1
            std::vector<long long> plants = engine.state().plants;
            std::vector<long long> polls = engine.state().polls;
            const int delta = (ev->kind == EventKind::PlantBirth || ev->kind == EventKind::PollBirth) ? -1 : +1;
            if (ev->kind == EventKind::PlantBirth || ev->kind == EventKind::PlantDeath)
                plants[ev->index] += delta;
            else
                polls[ev->index] += delta;
            const auto row = snapshot(plants, polls);
            while (next_rec < record_times.size() && record_times[next_rec] < t_new &&
                   record_times[next_rec] <= t_end) {
                result.trajectory.times.push_back(record_times[next_rec]);
                result.trajectory.values.push_back(row);
                ++next_rec;
            }
        }
    }
    // horizon reached mid-holding-time: the current state persists to t_end
    if (result.status == SimStatus::Completed) {
        while (next_rec < record_times.size() && record_times[next_rec] <= t_end) {
            result.trajectory.times.push_back(record_times[next_rec]);
            result.trajectory.values.push_back(snapshot(engine.state().plants, engine.state().polls));
            ++next_rec;
        }
    }
    result.events = engine.events();
    return result;
}

std::vector<SimResult> simulate_replicas(const Community& community, const RateParams& params, const Kernels& kernels,
                                         int K, const std::vector<long long>& init_plants,
                                         const std::vector<long long>& init_polls, double t_end,
                                         const std::vector<double>& record_times, std::uint64_t seed, int replicas,
                                         int jobs, const SimOptions& options) {
    std::vector<SimResult> results(replicas);
    parallel_for(replicas, jobs, [&](int r) {
        results[r] = simulate(community, params, kernels, K, init_plants, init_polls, t_end, record_times, seed,
                              static_cast<std::uint64_t>(r), options);
    });
    return results;
}

}  // namespace pollinet
