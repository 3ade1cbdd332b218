#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rdlab/common.hpp"
#include "rdlab/env_types.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/retriever.hpp"

namespace rdlab {

/// A policy as the episode loop sees it: given what is visible of the state
/// and which action kinds are legal, produce one action with its composite
/// log-probability and a value estimate.
struct ActionSample {
    Action action;
    int sub_index = 0;  // template index for Query, candidate index for Answer
    double log_prob = 0.0;
    double value = 0.0;
    std::uint64_t features_digest = 0;
};

class PolicyHandle {
  public:
    virtual ~PolicyHandle() = default;
    virtual ActionSample act(const StateView& view, const std::vector<ActionKind>& allowed,
                             SampleMode mode, Rng& rng) const = 0;
};

inline State new_state(const Question& q) { return State{q, {}}; }

/// Below quota both kinds are legal; at quota only Answer; beyond quota the
/// state itself is invalid.
inline std::vector<ActionKind> allowed_action_kinds(const State& s, const EnvConfig& cfg) {
    const int n = s.retrieve_count();
    if (n < cfg.quota_n) return {ActionKind::Answer, ActionKind::Query};
    if (n == cfg.quota_n) return {ActionKind::Answer};
    throw QuotaViolation("state holds " + std::to_string(n) + " observations with quota " +
                         std::to_string(cfg.quota_n));
}

struct Continue {
    State next_state;
    Observation observation;
};
struct Done {
    std::string final_answer;
};
using StepOutcome = std::variant<Continue, Done>;

/// Pure transition. Queries append their Observation (empty on a retrieval
/// miss, so the quota still advances); answers terminate the episode.
inline StepOutcome apply_action(const State& s, const Action& a, const RetrieverHandle& retriever,
                                const EnvConfig& cfg) {
    const auto allowed = allowed_action_kinds(s, cfg);
    if (std::find(allowed.begin(), allowed.end(), a.kind) == allowed.end()) {
        throw QuotaViolation("action kind not allowed at retrieve count " +
                             std::to_string(s.retrieve_count()));
    }
    if (a.kind == ActionKind::Answer) return Done{a.text};

    if (a.text.empty()) throw std::invalid_argument("query text must be non-empty");
    Observation obs = retriever.retrieve(a.text, cfg.top_k);
    State next = s;
    next.observations.push_back(obs);
    return Continue{std::move(next), std::move(obs)};
}

/// One full episode plus the visited states (states are needed by training;
/// rollout() below exposes the plain trajectory).
struct Episode {
    Trajectory trajectory;
    std::vector<State> states;  // states.size() == trajectory.steps.size()
};

inline Episode run_episode(const Question& q, const PolicyHandle& policy,
                           const RetrieverHandle& retriever, const EnvConfig& cfg, Rng& rng,
                           SampleMode mode) {
    const RewardConfig rcfg{cfg.alpha, cfg.gamma, 0.0};
    Episode ep;
    ep.trajectory.question_id = q.id;

    State state = new_state(q);
    std::vector<double> rewards;
    while (true) {
        const auto allowed = allowed_action_kinds(state, cfg);
        const ActionSample s = policy.act(make_view(state), allowed, mode, rng);
        const double r = step_reward(s.action, q, rcfg);

        TrajectoryStep step;
        step.kind = s.action.kind;
        step.text = s.action.text;
        step.log_prob = s.log_prob;
        step.value = s.value;
        step.reward = r;
        step.features_digest = s.features_digest;
        step.sub_index = s.sub_index;
        ep.trajectory.steps.push_back(std::move(step));
        ep.states.push_back(state);
        rewards.push_back(r);

        StepOutcome out = apply_action(state, s.action, retriever, cfg);
        if (std::holds_alternative<Done>(out)) {
            ep.trajectory.final_answer = std::get<Done>(out).final_answer;
            break;
        }
        state = std::move(std::get<Continue>(out).next_state);
    }
    ep.trajectory.total_return = discounted_return(rewards, cfg.gamma);
    return ep;
}

inline Trajectory rollout(const Question& q, const PolicyHandle& policy,
                          const RetrieverHandle& retriever, const EnvConfig& cfg, Rng& rng,
                          SampleMode mode) {
    return run_episode(q, policy, retriever, cfg, rng, mode).trajectory;
}

// ---- trajectory log (JSONL) ------------------------------------------------

inline nlohmann::json trajectory_to_json(const Trajectory& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        steps.push_back({{"kind", s.kind == ActionKind::Answer ? "answer" : "query"},
                         {"text", s.text},
                         {"logprob", s.log_prob},
                         {"value", s.value},
                         {"reward", s.reward}});
    }
    return nlohmann::json{{"question_id", t.question_id},
                          {"steps", steps},
                          {"final_answer", t.final_answer},
                          {"return", t.total_return}};
}

inline Trajectory trajectory_from_json(const nlohmann::json& j) {
    Trajectory t;
    t.question_id = j.at("question_id").get<std::string>();
    t.final_answer = j.at("final_answer").get<std::string>();
    t.total_return = j.at("return").get<double>();
    for (const auto& js : j.at("steps")) {
        TrajectoryStep s;
        s.kind = js.at("kind").get<std::string>() == "answer" ? ActionKind::Answer
                                                              : ActionKind::Query;
        s.text = js.at("text").get<std::string>();
        s.log_prob = js.at("logprob").get<double>();
        s.value = js.at("value").get<double>();
        s.reward = js.at("reward").get<double>();
        t.steps.push_back(std::move(s));
    }
    return t;
}

}  // namespace rdlab
