// simulator.hpp -- the toy crop-field environment: stochastic per-sector
// stress over an 89-day season, a fast coarse agent and a slow precise agent
// with asymmetric noise and cadence, an objective oracle terminating each
// call chain, and a greedy Q-learning baseline sharing the same plumbing.

#ifndef ADDF_SIMULATOR_HPP
#define ADDF_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "addf/mcesp.hpp"
#include "addf/rng.hpp"
#include "addf/team.hpp"

namespace addf {

inline constexpr int kFastLayer = 0;
inline constexpr int kSlowLayer = 1;
inline constexpr int kOracleLayer = 2;

enum class Method { addf, qlearning };

struct StressConfig {
  double p_init = 0.5;   // per-sector stress probability at day 0
  double p_flip = 0.5;   // base flip probability, decays as p_flip * decay^day
  double decay = 0.9;
};

struct AgentConfig {
  int cadence = 3;
  double p_correct = 0.7;
};

struct HeuristicConfig {
  bool enabled = false;
  double m = 5.0;
};

struct RewardConfig {
  double hit = 1.0;    // chain confirms stress
  double miss = -1.0;  // chain concludes healthy, and layer rejections
};

struct SimConfig {
  Method method = Method::addf;
  int seasons = 500;
  int season_days = 89;
  int sectors = 5;
  int obs_count = 3;
  std::uint64_t k = 500;
  HeuristicConfig heuristic;
  StressConfig stress;
  AgentConfig fast{3, 0.7};
  AgentConfig slow{1, 0.85};
  RewardConfig reward;
  std::uint64_t seed = 1;
  bool count_at_generation = true;
  std::string init_policy = "random";  // or "reject"
  // Stop a layer's exploring starts once its policy is locally optimal with
  // every neighbor sampled k times; it then acts greedily on what it learned.
  bool freeze_at_local_optimum = true;
};

namespace detail {

inline void expect_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                        const std::string& prefix, std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) errors.push_back("unknown key '" + prefix + it.key() + "'");
}

template <class T>
void read_key(const nlohmann::json& j, const std::string& key, T& out,
              const std::string& prefix, std::vector<std::string>& errors) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const std::exception&) {
    errors.push_back("bad value for '" + prefix + key + "'");
  }
}

}  // namespace detail

inline nlohmann::json config_to_json(const SimConfig& c) {
  return {{"method", c.method == Method::addf ? "addf" : "qlearning"},
          {"seasons", c.seasons},
          {"season_days", c.season_days},
          {"sectors", c.sectors},
          {"obs_count", c.obs_count},
          {"k", c.k},
          {"heuristic", {{"enabled", c.heuristic.enabled}, {"m", c.heuristic.m}}},
          {"stress",
           {{"p_init", c.stress.p_init}, {"p_flip", c.stress.p_flip}, {"decay", c.stress.decay}}},
          {"agents",
           {{"fast", {{"cadence", c.fast.cadence}, {"p_correct", c.fast.p_correct}}},
            {"slow", {{"cadence", c.slow.cadence}, {"p_correct", c.slow.p_correct}}}}},
          {"reward", {{"hit", c.reward.hit}, {"miss", c.reward.miss}}},
          {"seed", c.seed},
          {"count_at_generation", c.count_at_generation},
          {"init_policy", c.init_policy},
          {"freeze_at_local_optimum", c.freeze_at_local_optimum}};
}

// Strict parse: unknown keys, malformed values and out-of-range settings are
// all collected and reported together.
inline SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  std::vector<std::string> errors;
  if (!j.is_object()) throw std::invalid_argument("config: not a JSON object");

  detail::expect_keys(j,
                      {"method", "seasons", "season_days", "sectors", "obs_count", "k",
                       "heuristic", "stress", "agents", "reward", "seed", "count_at_generation",
                       "init_policy", "freeze_at_local_optimum"},
                      "", errors);

  std::string method = "addf";
  detail::read_key(j, "method", method, "", errors);
  if (method == "addf")
    c.method = Method::addf;
  else if (method == "qlearning")
    c.method = Method::qlearning;
  else
    errors.push_back("bad value for 'method' (want addf|qlearning)");

  detail::read_key(j, "seasons", c.seasons, "", errors);
  detail::read_key(j, "season_days", c.season_days, "", errors);
  detail::read_key(j, "sectors", c.sectors, "", errors);
  detail::read_key(j, "obs_count", c.obs_count, "", errors);
  detail::read_key(j, "k", c.k, "", errors);
  detail::read_key(j, "seed", c.seed, "", errors);
  detail::read_key(j, "count_at_generation", c.count_at_generation, "", errors);
  detail::read_key(j, "init_policy", c.init_policy, "", errors);
  detail::read_key(j, "freeze_at_local_optimum", c.freeze_at_local_optimum, "", errors);

  if (j.contains("heuristic")) {
    const auto& h = j.at("heuristic");
    detail::expect_keys(h, {"enabled", "m"}, "heuristic.", errors);
    detail::read_key(h, "enabled", c.heuristic.enabled, "heuristic.", errors);
    detail::read_key(h, "m", c.heuristic.m, "heuristic.", errors);
  }
  if (j.contains("stress")) {
    const auto& s = j.at("stress");
    detail::expect_keys(s, {"p_init", "p_flip", "decay"}, "stress.", errors);
    detail::read_key(s, "p_init", c.stress.p_init, "stress.", errors);
    detail::read_key(s, "p_flip", c.stress.p_flip, "stress.", errors);
    detail::read_key(s, "decay", c.stress.decay, "stress.", errors);
  }
  if (j.contains("agents")) {
    const auto& a = j.at("agents");
    detail::expect_keys(a, {"fast", "slow"}, "agents.", errors);
    if (a.contains("fast")) {
      detail::expect_keys(a.at("fast"), {"cadence", "p_correct"}, "agents.fast.", errors);
      detail::read_key(a.at("fast"), "cadence", c.fast.cadence, "agents.fast.", errors);
      detail::read_key(a.at("fast"), "p_correct", c.fast.p_correct, "agents.fast.", errors);
    }
    if (a.contains("slow")) {
      detail::expect_keys(a.at("slow"), {"cadence", "p_correct"}, "agents.slow.", errors);
      detail::read_key(a.at("slow"), "cadence", c.slow.cadence, "agents.slow.", errors);
      detail::read_key(a.at("slow"), "p_correct", c.slow.p_correct, "agents.slow.", errors);
    }
  }
  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    detail::expect_keys(r, {"hit", "miss"}, "reward.", errors);
    detail::read_key(r, "hit", c.reward.hit, "reward.", errors);
    detail::read_key(r, "miss", c.reward.miss, "reward.", errors);
  }

  if (c.seasons < 1) errors.push_back("'seasons' must be >= 1");
  if (c.season_days < 1) errors.push_back("'season_days' must be >= 1");
  if (c.sectors < 1) errors.push_back("'sectors' must be >= 1");
  if (c.obs_count != 3 && c.obs_count != 5) errors.push_back("'obs_count' must be 3 or 5");
  if (c.k < 1) errors.push_back("'k' must be >= 1");
  if (!(c.heuristic.m > 0)) errors.push_back("'heuristic.m' must be > 0");
  if (!(c.stress.p_init >= 0 && c.stress.p_init <= 1)) errors.push_back("'stress.p_init' must be in [0,1]");
  if (!(c.stress.p_flip >= 0 && c.stress.p_flip <= 1)) errors.push_back("'stress.p_flip' must be in [0,1]");
  if (!(c.stress.decay >= 0 && c.stress.decay <= 1)) errors.push_back("'stress.decay' must be in [0,1]");
  if (c.fast.cadence < 1) errors.push_back("'agents.fast.cadence' must be >= 1");
  if (c.slow.cadence < 1) errors.push_back("'agents.slow.cadence' must be >= 1");
  if (!(c.fast.p_correct >= 0 && c.fast.p_correct <= 1)) errors.push_back("'agents.fast.p_correct' must be in [0,1]");
  if (!(c.slow.p_correct >= 0 && c.slow.p_correct <= 1)) errors.push_back("'agents.slow.p_correct' must be in [0,1]");
  if (c.init_policy != "random" && c.init_policy != "reject")
    errors.push_back("'init_policy' must be random|reject");

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return c;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  // A run manifest embeds the config it ran with; accept it directly.
  if (j.is_object() && j.contains("config") && j.contains("version")) j = j.at("config");
  return config_from_json(j);
}

struct SeasonState {
  int day = 0;
  std::vector<std::uint8_t> stress;
  // Stress-episode index per sector: increments each time stress sets in, so
  // one distinct identification can be counted per episode.
  std::vector<int> episode;
};

inline SeasonState init_season(int sectors, double p_init, Rng& rng) {
  SeasonState s;
  s.stress.resize(static_cast<std::size_t>(sectors));
  s.episode.resize(static_cast<std::size_t>(sectors), 0);
  for (std::size_t i = 0; i < s.stress.size(); ++i) {
    s.stress[i] = rng.bernoulli(p_init) ? 1 : 0;
    if (s.stress[i]) s.episode[i] = 1;
  }
  return s;
}

// Each sector flips status independently with probability
// p_flip * decay^day; the season is unstable early and freezes later.
inline void advance_day(SeasonState& state, const StressConfig& stress, int season_days,
                        Rng& rng) {
  if (state.day + 1 >= season_days)
    throw std::logic_error("advance_day: season already ended");
  if (state.episode.size() != state.stress.size())
    state.episode.assign(state.stress.size(), 0);
  const double p = stress.p_flip * std::pow(stress.decay, static_cast<double>(state.day));
  for (std::size_t i = 0; i < state.stress.size(); ++i)
    if (rng.bernoulli(p)) {
      state.stress[i] = state.stress[i] ? 0 : 1;
      if (state.stress[i]) state.episode[i] += 1;
    }
  state.day += 1;
}

// Probability of each observation index given the truth. The correct extreme
// (0 healthy, levels-1 stressed) carries p_correct; the remainder is spread
// over the other indices geometrically (ratio 1/2) by distance from the
// correct extreme, normalized.
inline std::vector<double> observation_distribution(bool stressed, double p_correct, int levels) {
  if (levels < 2) throw std::invalid_argument("observation_distribution: need >= 2 levels");
  const int correct = stressed ? levels - 1 : 0;
  std::vector<double> p(static_cast<std::size_t>(levels), 0.0);
  double total_weight = 0.0;
  for (int o = 0; o < levels; ++o) {
    if (o == correct) continue;
    total_weight += std::pow(0.5, std::abs(o - correct));
  }
  for (int o = 0; o < levels; ++o) {
    if (o == correct)
      p[o] = p_correct;
    else
      p[o] = (1.0 - p_correct) * std::pow(0.5, std::abs(o - correct)) / total_weight;
  }
  return p;
}

inline int observe(const SeasonState& state, double p_correct, int sector, int levels, Rng& rng) {
  if (sector < 0 || sector >= static_cast<int>(state.stress.size()))
    throw std::invalid_argument("observe: unknown sector " + std::to_string(sector));
  const std::vector<double> p =
      observation_distribution(state.stress[static_cast<std::size_t>(sector)] != 0, p_correct,
                               levels);
  const double u = rng.uniform();
  double acc = 0.0;
  for (int o = 0; o < levels; ++o) {
    acc += p[o];
    if (u < acc) return o;
  }
  return levels - 1;
}

struct ConfusionTally {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

  void add(bool predicted_stress, bool truth) {
    if (predicted_stress)
      (truth ? tp : fp) += 1;
    else
      (truth ? fn : tn) += 1;
  }
  std::uint64_t total() const { return tp + tn + fp + fn; }
  double accuracy() const {
    const std::uint64_t t = total();
    return t == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(t);
  }
};

struct AgentSeasonStats {
  std::uint64_t correct = 0, total = 0;
};

struct ExperimentResult {
  SimConfig config;
  ConfusionTally fast, slow;
  std::uint64_t oracle_consults = 0;
  std::uint64_t stressed_consults = 0;  // classifications that came back stressed
  // Distinct stress episodes confirmed by at least one oracle classification:
  // how many stressed crops the slow agent's work actually found. Repeat
  // confirmations of an ongoing episode do not count again.
  std::uint64_t stressed_identified = 0;
  int fast_frozen_season = -1, slow_frozen_season = -1;  // -1: still exploring
  std::vector<AgentSeasonStats> fast_by_season, slow_by_season;
  EventLog log;
  QState fast_q, slow_q;
  ReactivePolicy fast_policy, slow_policy;

  double slow_decisions_per_season() const {
    return static_cast<double>(slow.total()) / static_cast<double>(config.seasons);
  }
};

inline int greedy_action(const QState& s, int obs) {
  int best = 0;
  double best_q = s.q_at(obs, 0);
  for (int a = 1; a < s.num_actions; ++a) {
    const double qa = s.q_at(obs, a);
    if (qa > best_q) {
      best = a;
      best_q = qa;
    }
  }
  return best;
}

// Runs the configured number of seasons with learners persisting across
// seasons. The fast agent images every sector on its cadence days; its calls
// queue up for the slow agent, which works through one per day. Chains end
// at the oracle, whose reward resolves every pending call on the sector.
// Decisions are tallied against ground truth at resolution time; calls still
// pending when a season ends are dropped without update.
inline ExperimentResult run_experiment(const SimConfig& cfg) {
  const int num_actions = 2;
  const double clamp = std::max(std::abs(cfg.reward.hit), std::abs(cfg.reward.miss));

  ExperimentResult res;
  res.config = cfg;
  res.fast_q = QState(cfg.obs_count, num_actions, clamp);
  res.slow_q = QState(cfg.obs_count, num_actions, clamp);

  Rng fast_rng(derive_seed(cfg.seed, 1));
  Rng slow_rng(derive_seed(cfg.seed, 2));
  Rng init_rng(derive_seed(cfg.seed, 3));
  if (cfg.init_policy == "random") {
    res.fast_policy = ReactivePolicy::random(cfg.obs_count, num_actions, init_rng);
    res.slow_policy = ReactivePolicy::random(cfg.obs_count, num_actions, init_rng);
  } else {
    res.fast_policy = ReactivePolicy::uniform_action(cfg.obs_count, num_actions, 0);
    res.slow_policy = ReactivePolicy::uniform_action(cfg.obs_count, num_actions, 0);
  }

  std::vector<QState*> qstates{&res.fast_q, &res.slow_q};
  std::vector<ReactivePolicy*> policies{&res.fast_policy, &res.slow_policy};
  res.fast_by_season.resize(static_cast<std::size_t>(cfg.seasons));
  res.slow_by_season.resize(static_cast<std::size_t>(cfg.seasons));

  const LayerOptions layer_opt{cfg.count_at_generation};
  const bool addf = cfg.method == Method::addf;
  std::vector<std::uint8_t> frozen(2, 0);
  // A layer is validated once it completes a whole sampling epoch (every
  // cell at k samples) with no dominating neighbor. Any transformation by
  // either layer invalidates both, since the game each was validated against
  // has changed.
  std::vector<std::uint8_t> validated(2, 0);
  std::uint64_t transforms_seen = 0;

  for (int season = 0; season < cfg.seasons; ++season) {
    Rng env_rng(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(season)));
    SeasonState state = init_season(cfg.sectors, cfg.stress.p_init, env_rng);
    PendingLedger ledger;
    std::deque<CallToAction> queue;
    std::set<std::pair<int, int>> found_episodes;  // (sector, episode) this season

    const auto truth = [&](int sector) {
      if (sector < 0 || sector >= cfg.sectors)
        throw std::invalid_argument("truth: unknown sector " + std::to_string(sector));
      return state.stress[static_cast<std::size_t>(sector)] != 0;
    };
    const auto tally_decision = [&](int layer, bool predicted, bool actual) {
      ConfusionTally& t = layer == kFastLayer ? res.fast : res.slow;
      t.add(predicted, actual);
      AgentSeasonStats& s = (layer == kFastLayer ? res.fast_by_season : res.slow_by_season)
          [static_cast<std::size_t>(season)];
      s.total += 1;
      if (predicted == actual) s.correct += 1;
    };

    ResolveOptions ropt;
    ropt.k = cfg.k;
    ropt.enable_transform = addf;
    ropt.log = &res.log;
    ropt.frozen_layers = &frozen;
    ropt.on_resolve = [&](const CallToAction& call, double) {
      tally_decision(call.layer, call.action > 0, truth(call.sector_id));
    };

    for (int day = 0; day < cfg.season_days; ++day) {
      ropt.day = day;

      if (day % cfg.fast.cadence == 0) {
        std::vector<std::pair<int, int>> sector_obs;
        sector_obs.reserve(static_cast<std::size_t>(cfg.sectors));
        for (int s = 0; s < cfg.sectors; ++s)
          sector_obs.emplace_back(s, observe(state, cfg.fast.p_correct, s, cfg.obs_count, env_rng));

        std::vector<CallToAction> calls;
        std::vector<std::pair<int, int>> rejected;
        if (addf && !frozen[kFastLayer]) {
          LayerStepResult r =
              layer_step(res.fast_policy, res.fast_q, sector_obs, kFastLayer, day, fast_rng,
                         layer_opt);
          calls = std::move(r.calls);
          rejected = std::move(r.rejected);
        } else {
          // Greedy baseline, or a terminated local search acting on its policy.
          for (const auto& [s, o] : sector_obs) {
            const int a = addf ? res.fast_policy(o) : greedy_action(res.fast_q, o);
            if (a > 0)
              calls.push_back({s, o, a, kFastLayer, day, false});
            else
              rejected.emplace_back(s, o);
          }
        }

        std::vector<CallToAction> injected;
        if (cfg.heuristic.enabled && !rejected.empty()) {
          // A rejected sector still waiting in the slow agent's backlog is
          // already an objective; re-injecting it would only displace fresh
          // work at the capacity limit.
          std::set<int> backlog;
          for (const CallToAction& queued : queue) backlog.insert(queued.sector_id);
          std::vector<std::pair<int, int>> candidates;
          for (const auto& sector_obs_pair : rejected)
            if (!backlog.count(sector_obs_pair.first)) candidates.push_back(sector_obs_pair);
          injected = apply_workload_heuristic(order_most_suspicious_first(candidates),
                                              calls.size(), cfg.heuristic.m, kFastLayer, day,
                                              fast_rng);
        }

        for (const CallToAction& c : calls) {
          ledger.add(c);
          queue.push_back(c);
          res.log.issued(day, kFastLayer, c);
        }
        std::set<int> injected_sectors;
        for (const CallToAction& c : injected) {
          ledger.add(c);
          queue.push_back(c);
          injected_sectors.insert(c.sector_id);
          res.log.heuristic_injected(day, kFastLayer, c);
        }
        // Rejections that were not injected are final immediately.
        for (const auto& [s, o] : rejected)
          if (!injected_sectors.count(s)) tally_decision(kFastLayer, false, truth(s));
      }

      if (day % cfg.slow.cadence == 0 && !queue.empty()) {
        const CallToAction item = queue.front();
        queue.pop_front();
        const int obs = observe(state, cfg.slow.p_correct, item.sector_id, cfg.obs_count, env_rng);

        std::optional<CallToAction> slow_call;
        std::optional<RewardRecord> rejection;
        if (addf && !frozen[kSlowLayer]) {
          L2StepResult r = l2_step(res.slow_policy, res.slow_q, {item}, {obs}, cfg.reward.miss,
                                   kSlowLayer, day, slow_rng, layer_opt);
          if (!r.calls.empty())
            slow_call = r.calls.front();
          else
            rejection = r.rejections.front();
        } else {
          const int a = addf ? res.slow_policy(obs) : greedy_action(res.slow_q, obs);
          if (a > 0)
            slow_call = CallToAction{item.sector_id, obs, a, kSlowLayer, day, false};
          else
            rejection = RewardRecord{item.sector_id, cfg.reward.miss, kSlowLayer};
        }

        const auto consult_oracle = [&](const CallToAction& chain_call) {
          res.oracle_consults += 1;
          const int sector = chain_call.sector_id;
          if (truth(sector)) {
            res.stressed_consults += 1;
            if (found_episodes.insert({sector, state.episode[static_cast<std::size_t>(sector)]})
                    .second)
              res.stressed_identified += 1;
          }
          const std::vector<RewardRecord> records =
              l1_classify({chain_call}, truth, cfg.reward.hit, cfg.reward.miss, kOracleLayer);
          resolve_rewards(ledger, records, qstates, policies, ropt);
        };

        if (slow_call) {
          ledger.add(*slow_call);
          res.log.issued(day, kSlowLayer, *slow_call);
          consult_oracle(*slow_call);
        } else if (cfg.heuristic.enabled &&
                   slow_rng.bernoulli(heuristic_weight(cfg.heuristic.m, 0, 0))) {
          // Forward the rejected sector to the oracle anyway; the chain then
          // resolves with the true classification instead of a blanket miss.
          const CallToAction forward{item.sector_id, obs, 0, kSlowLayer, day, true};
          ledger.add(forward);
          res.log.heuristic_injected(day, kSlowLayer, forward);
          consult_oracle(forward);
        } else {
          tally_decision(kSlowLayer, false, truth(item.sector_id));
          resolve_rewards(ledger, {*rejection}, qstates, policies, ropt);
        }
      }

      // The team's search terminates jointly: freezing one layer while its
      // peer is still learning would lock in a policy tuned to a bad partner
      // (all-reject starves the slow agent of work for good). A layer that
      // finishes a sampling epoch (every cell at k samples) without a
      // dominating neighbor counts as validated and starts a fresh epoch, so
      // its estimates keep re-anchoring to the peer's current behavior. Once
      // both layers are validated the search is done and both act greedily.
      if (addf && cfg.freeze_at_local_optimum && !frozen[kFastLayer]) {
        if (res.fast_q.transforms + res.slow_q.transforms != transforms_seen) {
          transforms_seen = res.fast_q.transforms + res.slow_q.transforms;
          validated[kFastLayer] = 0;
          validated[kSlowLayer] = 0;
        }
        QState* qs[2] = {&res.fast_q, &res.slow_q};
        const ReactivePolicy* pol[2] = {&res.fast_policy, &res.slow_policy};
        for (int layer : {kFastLayer, kSlowLayer}) {
          if (*std::min_element(qs[layer]->counts.begin(), qs[layer]->counts.end()) < cfg.k)
            continue;
          validated[layer] = locally_optimal(*qs[layer], *pol[layer], cfg.k) ? 1 : 0;
          std::fill(qs[layer]->counts.begin(), qs[layer]->counts.end(), std::uint64_t{0});
        }
        if (validated[kFastLayer] && validated[kSlowLayer]) {
          frozen[kFastLayer] = 1;
          frozen[kSlowLayer] = 1;
          res.fast_frozen_season = season;
          res.slow_frozen_season = season;
        }
      }

      if (day + 1 < cfg.season_days) advance_day(state, cfg.stress, cfg.season_days, env_rng);
    }
    // Pending calls and queued work do not survive the season.
  }
  return res;
}

inline ExperimentResult run_addf_experiment(SimConfig cfg) {
  cfg.method = Method::addf;
  return run_experiment(cfg);
}

inline ExperimentResult run_qlearning_baseline(SimConfig cfg) {
  cfg.method = Method::qlearning;
  return run_experiment(cfg);
}

inline void write_tally_csv(std::ostream& out, const ExperimentResult& res) {
  const auto row = [&out](const char* agent, const ConfusionTally& t) {
    out << agent << "," << t.tp << "," << t.tn << "," << t.fp << "," << t.fn << ",";
    if (t.total() == 0) {
      out << "na";
    } else {
      std::ostringstream acc;
      acc << std::fixed << std::setprecision(4) << t.accuracy();
      out << acc.str();
    }
    out << "\n";
  };
  out << "agent,tp,tn,fp,fn,overall\n";
  row("fast", res.fast);
  row("slow", res.slow);
}

inline std::string tally_csv(const ExperimentResult& res) {
  std::ostringstream out;
  write_tally_csv(out, res);
  return out.str();
}

}  // namespace addf

#endif
