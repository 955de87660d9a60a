// mcesp.hpp -- Monte Carlo Exploring Starts over memory-less reactive
// policies: tabular Q estimates with a depreciating learning rate, a
// sample-count gate on policy transformations, and full counter reset when a
// transformation is accepted.

#ifndef ADDF_MCESP_HPP
#define ADDF_MCESP_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "addf/rng.hpp"

namespace addf {

// Total map from observation index to action index.
struct ReactivePolicy {
  std::vector<int> action_for;
  int num_actions = 2;

  int operator()(int obs) const { return action_for.at(static_cast<std::size_t>(obs)); }
  int num_obs() const { return static_cast<int>(action_for.size()); }

  static ReactivePolicy uniform_action(int num_obs, int num_actions, int action) {
    if (action < 0 || action >= num_actions)
      throw std::invalid_argument("ReactivePolicy: action out of range");
    ReactivePolicy p;
    p.num_actions = num_actions;
    p.action_for.assign(static_cast<std::size_t>(num_obs), action);
    return p;
  }

  static ReactivePolicy random(int num_obs, int num_actions, Rng& rng) {
    ReactivePolicy p;
    p.num_actions = num_actions;
    p.action_for.resize(static_cast<std::size_t>(num_obs));
    for (int& a : p.action_for) a = static_cast<int>(rng.below(num_actions));
    return p;
  }
};

// Q-value and visit-count tables keyed by (observation, action), plus the
// number of accepted policy transformations. Rewards are clamped to
// [-max_abs_reward, max_abs_reward] so Q entries stay finite.
struct QState {
  int num_obs = 0;
  int num_actions = 0;
  std::vector<double> q;
  std::vector<std::uint64_t> counts;
  std::uint64_t transforms = 0;
  double max_abs_reward = 1.0;

  QState() = default;
  QState(int n_obs, int n_actions, double reward_clamp = 1.0)
      : num_obs(n_obs),
        num_actions(n_actions),
        q(static_cast<std::size_t>(n_obs) * n_actions, 0.0),
        counts(static_cast<std::size_t>(n_obs) * n_actions, 0),
        max_abs_reward(reward_clamp) {
    if (n_obs < 1 || n_actions < 1) throw std::invalid_argument("QState: empty spaces");
  }

  std::size_t idx(int obs, int action) const {
    if (obs < 0 || obs >= num_obs || action < 0 || action >= num_actions)
      throw std::invalid_argument("QState: (obs, action) out of range");
    return static_cast<std::size_t>(obs) * num_actions + action;
  }
  double q_at(int obs, int action) const { return q[idx(obs, action)]; }
  std::uint64_t count_at(int obs, int action) const { return counts[idx(obs, action)]; }
};

// Depreciating learning rate 1/(c+1). Starting from a zero count this makes
// the Q entry the exact running mean of its rewards.
inline double learning_rate(std::uint64_t c) { return 1.0 / static_cast<double>(c + 1); }

inline void q_update(QState& s, int obs, int action, double reward) {
  const std::size_t i = s.idx(obs, action);
  const double r = std::clamp(reward, -s.max_abs_reward, s.max_abs_reward);
  const double alpha = learning_rate(s.counts[i]);
  s.q[i] = (1.0 - alpha) * s.q[i] + alpha * r;
  s.counts[i] += 1;
}

// Acceptance threshold: infinite until both compared cells have k samples,
// zero afterwards.
inline double epsilon_gate(std::uint64_t k, std::uint64_t c_challenger,
                           std::uint64_t c_incumbent) {
  return (c_challenger < k || c_incumbent < k) ? std::numeric_limits<double>::infinity() : 0.0;
}

// Accepts the best challenger at `obs` if its Q strictly exceeds the
// incumbent's plus the gate. Ties keep the incumbent. On acceptance every
// count resets to zero and the transformation counter increments.
inline bool maybe_transform(QState& s, ReactivePolicy& policy, int obs, std::uint64_t k) {
  const int incumbent = policy(obs);
  int best = 0;
  double best_q = s.q_at(obs, 0);
  for (int a = 1; a < s.num_actions; ++a) {
    const double qa = s.q_at(obs, a);
    if (qa > best_q) {
      best = a;
      best_q = qa;
    }
  }
  if (best == incumbent) return false;
  const double gate = epsilon_gate(k, s.count_at(obs, best), s.count_at(obs, incumbent));
  if (!(best_q > s.q_at(obs, incumbent) + gate)) return false;

  policy.action_for[static_cast<std::size_t>(obs)] = best;
  s.transforms += 1;
  std::fill(s.counts.begin(), s.counts.end(), std::uint64_t{0});
  return true;
}

// Local optimality test: every neighbor has k samples since the last counter
// reset and none strictly dominates its incumbent. A learner that reaches
// this state has finished its local search; exploring further only adds
// noise.
inline bool locally_optimal(const QState& s, const ReactivePolicy& policy, std::uint64_t k) {
  for (const std::uint64_t c : s.counts)
    if (c < k) return false;
  for (int o = 0; o < s.num_obs; ++o) {
    const double incumbent_q = s.q_at(o, policy(o));
    for (int a = 0; a < s.num_actions; ++a)
      if (s.q_at(o, a) > incumbent_q) return false;
  }
  return true;
}

// The local policy neighborhood element evaluated this step: play `action`
// whenever `obs` comes up, the current policy everywhere else.
struct Transform {
  int obs = 0;
  int action = 0;
};

inline ReactivePolicy transformed(const ReactivePolicy& policy, const Transform& t) {
  ReactivePolicy p = policy;
  p.action_for.at(static_cast<std::size_t>(t.obs)) = t.action;
  return p;
}

// Uniform draw over all (obs, action) cells.
inline Transform exploring_start(const ReactivePolicy& policy, Rng& rng) {
  const int cells = policy.num_obs() * policy.num_actions;
  if (policy.num_obs() < 1 || policy.num_actions < 2)
    throw std::invalid_argument("exploring_start: need |O| >= 1 and |A| >= 2");
  const int cell = static_cast<int>(rng.below(static_cast<std::size_t>(cells)));
  return {cell / policy.num_actions, cell % policy.num_actions};
}

// Deterministic alternative to the random draw: cycles through cells in
// (obs-major, action-minor) order.
struct RoundRobinStarts {
  int cursor = 0;
  Transform next(const ReactivePolicy& policy) {
    const int cells = policy.num_obs() * policy.num_actions;
    const int cell = cursor % cells;
    cursor = (cursor + 1) % cells;
    return {cell / policy.num_actions, cell % policy.num_actions};
  }
};

// Checkpoint format: Q and count tables as [obs, action, value] triplets plus
// the policy's action per observation.
inline nlohmann::json checkpoint_to_json(const QState& s, const ReactivePolicy& policy) {
  nlohmann::json q = nlohmann::json::array();
  nlohmann::json counts = nlohmann::json::array();
  for (int o = 0; o < s.num_obs; ++o)
    for (int a = 0; a < s.num_actions; ++a) {
      q.push_back({o, a, s.q_at(o, a)});
      counts.push_back({o, a, s.count_at(o, a)});
    }
  return {{"q", q},
          {"counts", counts},
          {"transforms", s.transforms},
          {"policy", policy.action_for}};
}

inline std::pair<QState, ReactivePolicy> checkpoint_from_json(const nlohmann::json& j,
                                                              double reward_clamp = 1.0) {
  const auto& q = j.at("q");
  int num_obs = 0, num_actions = 0;
  for (const auto& triple : q) {
    num_obs = std::max(num_obs, triple.at(0).get<int>() + 1);
    num_actions = std::max(num_actions, triple.at(1).get<int>() + 1);
  }
  if (num_obs == 0 || num_actions == 0)
    throw std::invalid_argument("checkpoint: empty q table");
  QState s(num_obs, num_actions, reward_clamp);
  for (const auto& triple : q)
    s.q[s.idx(triple.at(0).get<int>(), triple.at(1).get<int>())] = triple.at(2).get<double>();
  for (const auto& triple : j.at("counts"))
    s.counts[s.idx(triple.at(0).get<int>(), triple.at(1).get<int>())] =
        triple.at(2).get<std::uint64_t>();
  s.transforms = j.at("transforms").get<std::uint64_t>();

  ReactivePolicy policy;
  policy.num_actions = num_actions;
  policy.action_for = j.at("policy").get<std::vector<int>>();
  if (static_cast<int>(policy.action_for.size()) != num_obs)
    throw std::invalid_argument("checkpoint: policy size does not match q table");
  for (int a : policy.action_for)
    if (a < 0 || a >= num_actions) throw std::invalid_argument("checkpoint: action out of range");
  return {std::move(s), std::move(policy)};
}

}  // namespace addf

#endif
