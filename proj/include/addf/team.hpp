// team.hpp -- layered-agent orchestration. Upper layers turn sector
// observations into calls-to-action, lower layers act on them, and rewards
// flow back asynchronously through a pending ledger, possibly out of issue
// order. The workload heuristic re-injects rejected sectors with
// exponentially decaying probability to keep lower layers busy.

#ifndef ADDF_TEAM_HPP
#define ADDF_TEAM_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "addf/mcesp.hpp"
#include "addf/rng.hpp"

namespace addf {

// A coarse layer asking a finer one to inspect a sector. For heuristic
// injections the stored action is the one the policy actually chose
// (reject), flagged so that resolution credits both actions' counterfactuals.
struct CallToAction {
  int sector_id = 0;
  int obs = 0;
  int action = 0;
  int layer = 0;
  int day_issued = 0;
  bool heuristic = false;
};

struct RewardRecord {
  int sector_id = 0;
  double reward = 0.0;
  int source_layer = 0;
};

// Unresolved calls in issue order. Each call is removed exactly once, when a
// reward for its (layer, sector) arrives; within a key, oldest first.
class PendingLedger {
 public:
  void add(const CallToAction& call) { pending_.push_back(call); }

  std::optional<CallToAction> take_oldest(int layer, int sector) {
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      if (pending_[i].layer == layer && pending_[i].sector_id == sector) {
        CallToAction call = pending_[i];
        pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(i));
        return call;
      }
    }
    return std::nullopt;
  }

  // Layers with at least one pending call on `sector`, ascending.
  std::vector<int> layers_with_pending(int sector) const {
    std::vector<int> layers;
    for (const CallToAction& c : pending_)
      if (c.sector_id == sector) layers.push_back(c.layer);
    std::sort(layers.begin(), layers.end());
    layers.erase(std::unique(layers.begin(), layers.end()), layers.end());
    return layers;
  }

  std::size_t size() const { return pending_.size(); }
  bool empty() const { return pending_.empty(); }
  void clear() { pending_.clear(); }
  const std::vector<CallToAction>& items() const { return pending_; }

 private:
  std::vector<CallToAction> pending_;
};

// Newline-delimited JSON event stream for post-hoc analysis.
class EventLog {
 public:
  void issued(int day, int layer, const CallToAction& c) { push("issued", day, layer, c); }
  void heuristic_injected(int day, int layer, const CallToAction& c) {
    push("heuristic_injected", day, layer, c);
  }
  void resolved(int day, int layer, const CallToAction& c, double reward) {
    nlohmann::json j = base("resolved", day, layer, c);
    j["reward"] = reward;
    lines_.push_back(std::move(j));
  }
  void transformed(int day, int layer, int sector, int obs, int new_action) {
    lines_.push_back({{"day", day},
                      {"layer", layer},
                      {"event", "transformed"},
                      {"sector", sector},
                      {"obs", obs},
                      {"action", new_action}});
  }

  void write(std::ostream& out) const {
    for (const nlohmann::json& j : lines_) out << j.dump() << "\n";
  }
  std::string str() const {
    std::ostringstream out;
    write(out);
    return out.str();
  }
  std::size_t size() const { return lines_.size(); }
  const std::vector<nlohmann::json>& lines() const { return lines_; }
  void clear() { lines_.clear(); }

 private:
  static nlohmann::json base(const char* event, int day, int layer, const CallToAction& c) {
    return {{"day", day},       {"layer", layer},   {"event", event},
            {"sector", c.sector_id}, {"obs", c.obs}, {"action", c.action}};
  }
  void push(const char* event, int day, int layer, const CallToAction& c) {
    lines_.push_back(base(event, day, layer, c));
  }

  std::vector<nlohmann::json> lines_;
};

struct LayerOptions {
  // Count one sample per trajectory generated under the explored neighbor at
  // call-generation time (a step over N sectors plays N single-horizon
  // games). Games that touch the explored cell itself are excluded here:
  // explored rejects record their zero return through q_update on the spot,
  // and explored calls record theirs when the reward resolves. Without any
  // of this the reject cells never accumulate samples and the gate stays
  // closed forever.
  bool count_at_generation = true;
};

struct LayerStepResult {
  std::vector<CallToAction> calls;                // action > 0
  std::vector<std::pair<int, int>> rejected;      // (sector, obs) with action 0
  Transform explored;
};

// One step of a learning layer: draw an exploring start, act on every sector
// observation under the locally transformed policy, and extract a call for
// each sector whose chosen action is positive. A rejected sector whose
// observation matches the explored cell is a finished game with a known
// return of zero, and is recorded as such; without these samples the reject
// estimates go stale the moment the policy stops rejecting.
inline LayerStepResult layer_step(const ReactivePolicy& policy, QState& qstate,
                                  const std::vector<std::pair<int, int>>& sector_obs, int layer,
                                  int day, Rng& rng, const LayerOptions& opt = {}) {
  LayerStepResult res;
  res.explored = exploring_start(policy, rng);

  const ReactivePolicy local = transformed(policy, res.explored);
  std::size_t explored_games = 0;
  for (const auto& [sector, obs] : sector_obs) {
    const int action = local(obs);
    if (obs == res.explored.obs) ++explored_games;
    if (action > 0) {
      res.calls.push_back({sector, obs, action, layer, day, false});
    } else {
      res.rejected.emplace_back(sector, obs);
      if (obs == res.explored.obs) q_update(qstate, obs, action, 0.0);
    }
  }
  if (opt.count_at_generation)
    qstate.counts[qstate.idx(res.explored.obs, res.explored.action)] +=
        sector_obs.size() - explored_games;
  return res;
}

struct L2StepResult {
  std::vector<CallToAction> calls;
  std::vector<RewardRecord> rejections;           // one per incoming call not acted on
  std::vector<std::pair<int, int>> rejected;      // (sector, obs) aligned with rejections
  Transform explored;
};

// A lower layer acting on incoming calls only. Sectors it does not consider
// stressed are answered with a negative reward addressed to the caller;
// sectors it does are forwarded onward.
inline L2StepResult l2_step(const ReactivePolicy& policy, QState& qstate,
                            const std::vector<CallToAction>& incoming,
                            const std::vector<int>& obs_for_incoming, double rejection_reward,
                            int layer, int day, Rng& rng, const LayerOptions& opt = {}) {
  if (incoming.size() != obs_for_incoming.size())
    throw std::invalid_argument("l2_step: one observation required per incoming call");

  L2StepResult res;
  res.explored = exploring_start(policy, rng);

  const ReactivePolicy local = transformed(policy, res.explored);
  std::size_t explored_games = 0;
  for (std::size_t i = 0; i < incoming.size(); ++i) {
    const int sector = incoming[i].sector_id;
    const int obs = obs_for_incoming[i];
    const int action = local(obs);
    if (obs == res.explored.obs) ++explored_games;
    if (action > 0) {
      res.calls.push_back({sector, obs, action, layer, day, false});
    } else {
      res.rejections.push_back({sector, rejection_reward, layer});
      res.rejected.emplace_back(sector, obs);
      if (obs == res.explored.obs) q_update(qstate, obs, action, 0.0);
    }
  }
  if (opt.count_at_generation)
    qstate.counts[qstate.idx(res.explored.obs, res.explored.action)] +=
        incoming.size() - explored_games;
  return res;
}

// The objective bottom layer: classifies each called sector against ground
// truth and dispenses the reward for the whole chain.
inline std::vector<RewardRecord> l1_classify(const std::vector<CallToAction>& incoming,
                                             const std::function<bool(int)>& stressed,
                                             double hit_reward, double miss_reward,
                                             int oracle_layer) {
  std::vector<RewardRecord> records;
  records.reserve(incoming.size());
  for (const CallToAction& call : incoming)
    records.push_back(
        {call.sector_id, stressed(call.sector_id) ? hit_reward : miss_reward, oracle_layer});
  return records;
}

struct ResolveOptions {
  std::uint64_t k = 500;
  bool enable_transform = true;  // greedy baselines keep the tables but never transform
  int call_action = 1;           // counterfactual credit target for heuristic injections
  EventLog* log = nullptr;
  int day = 0;
  // Layers whose local search has terminated: their pending calls still
  // resolve (ledger conservation, tallies) but no longer update anything.
  const std::vector<std::uint8_t>* frozen_layers = nullptr;
  // Invoked once per resolved call with the applied reward; the simulator
  // uses it to tally decisions against ground truth at resolution time.
  std::function<void(const CallToAction&, double)> on_resolve;
};

// Applies reward records to pending calls. Each record resolves the oldest
// pending call of every layer holding one on that sector: Q-update on the
// call's cell (both cells, with opposite signs, for heuristic injections),
// then a transformation attempt at that observation.
inline void resolve_rewards(PendingLedger& ledger, const std::vector<RewardRecord>& records,
                            std::vector<QState*>& qstates,
                            std::vector<ReactivePolicy*>& policies, const ResolveOptions& opt) {
  if (qstates.size() != policies.size())
    throw std::invalid_argument("resolve_rewards: one policy required per QState");
  for (const RewardRecord& record : records) {
    const std::vector<int> layers = ledger.layers_with_pending(record.sector_id);
    if (layers.empty())
      throw std::logic_error("resolve_rewards: reward for sector " +
                             std::to_string(record.sector_id) + " with no pending call");
    for (int layer : layers) {
      const std::optional<CallToAction> call = ledger.take_oldest(layer, record.sector_id);
      QState& qs = *qstates.at(static_cast<std::size_t>(layer));
      ReactivePolicy& policy = *policies.at(static_cast<std::size_t>(layer));
      const bool frozen = opt.frozen_layers &&
                          (*opt.frozen_layers)[static_cast<std::size_t>(layer)] != 0;

      if (!frozen) {
        if (call->heuristic) {
          q_update(qs, call->obs, opt.call_action, record.reward);
          q_update(qs, call->obs, call->action, -record.reward);
        } else {
          q_update(qs, call->obs, call->action, record.reward);
        }
      }
      if (opt.log) opt.log->resolved(opt.day, layer, *call, record.reward);
      if (opt.on_resolve) opt.on_resolve(*call, record.reward);

      if (!frozen && opt.enable_transform && maybe_transform(qs, policy, call->obs, opt.k)) {
        if (opt.log)
          opt.log->transformed(opt.day, layer, call->sector_id, call->obs, policy(call->obs));
      }
    }
  }
}

// Inclusion probability of the i-th rejected sector given `accepted` accepted
// calls this step. Strictly decreasing in i and accepted, increasing in m.
inline double heuristic_weight(double m, std::size_t accepted, std::size_t i) {
  return m / (m + static_cast<double>(accepted) + static_cast<double>(i));
}

// Orders rejected (sector, obs) pairs most suspicious first so near-accepted
// sectors get the highest injection weight.
inline std::vector<std::pair<int, int>> order_most_suspicious_first(
    std::vector<std::pair<int, int>> rejected) {
  std::sort(rejected.begin(), rejected.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return rejected;
}

// Draws each rejected sector into the call list with probability
// m / (m + accepted + i). `rejected` must already be ordered most suspicious
// first. Injected calls keep action 0 and carry the heuristic flag.
inline std::vector<CallToAction> apply_workload_heuristic(
    const std::vector<std::pair<int, int>>& rejected, std::size_t accepted_count, double m,
    int layer, int day, Rng& rng) {
  std::vector<CallToAction> injected;
  for (std::size_t i = 0; i < rejected.size(); ++i) {
    const double w = heuristic_weight(m, accepted_count, i);
    if (rng.bernoulli(w))
      injected.push_back({rejected[i].first, rejected[i].second, 0, layer, day, true});
  }
  return injected;
}

}  // namespace addf

#endif
