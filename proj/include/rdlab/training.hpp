#pragma once

// Learning machinery for the scored policy: warm-up behavior cloning,
// generalized advantage estimation, rollout collection and the clipped
// surrogate update. All gradients are analytic; the test suite pins them
// against central finite differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <numeric>
#include <string>
#include <vector>

#include "rdlab/common.hpp"
#include "rdlab/env.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/policy.hpp"
#include "rdlab/retriever.hpp"

namespace rdlab {

// ---- gradient container -----------------------------------------------------

struct GradVec {
    std::vector<double> w_dec, w_rew, w_ans, w_val, w_hid;

    static GradVec zeros_like(const PolicyParams& p) {
        GradVec g;
        g.w_dec.assign(p.w_dec.size(), 0.0);
        g.w_rew.assign(p.w_rew.size(), 0.0);
        g.w_ans.assign(p.w_ans.size(), 0.0);
        g.w_val.assign(p.w_val.size(), 0.0);
        g.w_hid.assign(p.w_hid.size(), 0.0);
        return g;
    }

    void scale(double s) {
        for (auto* v : {&w_dec, &w_rew, &w_ans, &w_val, &w_hid})
            for (auto& x : *v) x *= s;
    }

    double l2() const {
        double ss = 0.0;
        for (const auto* v : {&w_dec, &w_rew, &w_ans, &w_val, &w_hid})
            for (double x : *v) ss += x * x;
        return std::sqrt(ss);
    }
};

inline void apply_gradient(PolicyParams& p, const GradVec& g, double lr) {
    auto step = [lr](std::vector<double>& w, const std::vector<double>& gw) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
    };
    step(p.w_dec, g.w_dec);
    step(p.w_rew, g.w_rew);
    step(p.w_ans, g.w_ans);
    step(p.w_val, g.w_val);
    step(p.w_hid, g.w_hid);
}

namespace detail {

/// Backpropagate logit-space gradients (and a value-path coefficient) into
/// parameter space, accumulating `scale` times the result into `g`.
/// Empty logit-gradient vectors mean "no gradient through that head".
inline void backprop(const PolicyParams& p, const Forward& fw, const std::vector<double>& g_dec,
                     const std::vector<double>& g_rew, const std::vector<double>& g_ans,
                     double g_val, double scale, GradVec& g) {
    const int z = static_cast<int>(fw.z.size());
    std::vector<double> dz(z, 0.0);

    if (!g_dec.empty()) {
        for (int r = 0; r < 2; ++r) {
            if (g_dec[r] == 0.0) continue;
            const double* row = p.w_dec.data() + static_cast<std::size_t>(r) * z;
            double* grow = g.w_dec.data() + static_cast<std::size_t>(r) * z;
            for (int j = 0; j < z; ++j) {
                grow[j] += scale * g_dec[r] * fw.z[j];
                dz[j] += g_dec[r] * row[j];
            }
        }
    }
    if (!g_rew.empty()) {
        for (int r = 0; r < p.config.n_templates; ++r) {
            if (g_rew[r] == 0.0) continue;
            const double* row = p.w_rew.data() + static_cast<std::size_t>(r) * z;
            double* grow = g.w_rew.data() + static_cast<std::size_t>(r) * z;
            for (int j = 0; j < z; ++j) {
                grow[j] += scale * g_rew[r] * fw.z[j];
                dz[j] += g_rew[r] * row[j];
            }
        }
    }
    if (!g_ans.empty()) {
        const int zb = 5 + p.config.cand_hash_dim;  // memory-gated block offset
        for (std::size_t c = 0; c < fw.cand_phi.size(); ++c) {
            if (g_ans[c] == 0.0) continue;
            const auto& phi = fw.cand_phi[c];
            for (std::size_t j = 0; j < phi.size(); ++j) g.w_ans[j] += scale * g_ans[c] * phi[j];
            if (fw.candidates[c].from_memory)
                for (int j = 0; j < z; ++j) dz[j] += g_ans[c] * p.w_ans[zb + j];
        }
    }
    if (g_val != 0.0) {
        for (int j = 0; j < z; ++j) {
            g.w_val[j] += scale * g_val * fw.z[j];
            dz[j] += g_val * p.w_val[j];
        }
    }

    if (p.config.hidden_dim > 0) {
        const int d = p.config.dim;
        for (int h = 0; h < p.config.hidden_dim; ++h) {
            const double pre = dz[h] * (1.0 - fw.z[h] * fw.z[h]);  // through tanh
            if (pre == 0.0) continue;
            double* grow = g.w_hid.data() + static_cast<std::size_t>(h) * d;
            for (int j = 0; j < d; ++j) grow[j] += scale * pre * fw.features[j];
        }
    }
}

/// Entropy of a distribution whose entries may be exactly zero (masked).
inline double entropy_of(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

inline int kind_index(ActionKind k) { return k == ActionKind::Answer ? 0 : 1; }

}  // namespace detail

// ---- warm-up dataset ----------------------------------------------------------

/// Two cloning styles. The plain style keeps, per question, a direct answer
/// from memory, an oracle query, and a post-retrieval answer. The filtered
/// style keeps only the direct answer when the memory entry already agrees
/// with the gold (token F1 >= threshold), otherwise only the retrieval pair,
/// so the cloned behavior is "answer what you know, look up what you don't".
enum class WarmupStyle { Plain, Filtered };

struct SftExample {
    State state;
    std::vector<ActionKind> allowed;
    ActionKind target_kind = ActionKind::Answer;
    int target_template = -1;   // set when target_kind == Query
    std::string target_answer;  // set when target_kind == Answer
};

struct WarmupConfig {
    WarmupStyle style = WarmupStyle::Filtered;
    double memory_f1_threshold = 0.2;
};

/// `oracle` maps a question to the rewrite template a noisy teacher suggests.
inline std::vector<SftExample> build_warmup_dataset(
    const std::vector<Question>& questions, const Memory& memory,
    const RetrieverHandle& retriever, const EnvConfig& env_cfg,
    const std::function<RewriteTemplate(const Question&)>& oracle, const WarmupConfig& cfg) {
    std::vector<SftExample> out;
    for (const auto& q : questions) {
        const std::string mem_answer = memory.count(q.id) ? memory.at(q.id) : "";
        double mem_f1 = 0.0;
        for (const auto& g : q.gold_answers) mem_f1 = std::max(mem_f1, token_f1(mem_answer, {g}));

        const bool keep_direct =
            cfg.style == WarmupStyle::Plain || mem_f1 >= cfg.memory_f1_threshold;
        const bool keep_lookup =
            cfg.style == WarmupStyle::Plain || mem_f1 < cfg.memory_f1_threshold;

        State s0 = new_state(q);
        const auto allowed0 = allowed_action_kinds(s0, env_cfg);

        if (keep_direct) {
            SftExample ex;
            ex.state = s0;
            ex.allowed = allowed0;
            ex.target_kind = ActionKind::Answer;
            ex.target_answer = mem_answer;
            out.push_back(std::move(ex));
        }
        if (keep_lookup && env_cfg.quota_n >= 1) {
            const RewriteTemplate t = oracle(q);
            const std::string query = apply_template(t, q.text);

            SftExample ask;
            ask.state = s0;
            ask.allowed = allowed0;
            ask.target_kind = ActionKind::Query;
            ask.target_template = static_cast<int>(t);
            out.push_back(std::move(ask));

            StepOutcome outc = apply_action(s0, Action{ActionKind::Query, query}, retriever, env_cfg);
            State s1 = std::move(std::get<Continue>(outc).next_state);
            const auto allowed1 = allowed_action_kinds(s1, env_cfg);

            // teacher picks the best available candidate by gold overlap
            PolicyConfig pc;  // candidate enumeration only reads structural fields
            auto cands = enumerate_candidates(make_view(s1), memory, pc);
            std::size_t best = 0;
            double best_f1 = -1.0;
            for (std::size_t i = 0; i < cands.size(); ++i) {
                const double f1 = token_f1(cands[i].text, q.gold_answers);
                if (f1 > best_f1) {
                    best_f1 = f1;
                    best = i;
                }
            }
            SftExample ans;
            ans.state = std::move(s1);
            ans.allowed = allowed1;
            ans.target_kind = ActionKind::Answer;
            ans.target_answer = cands[best].text;
            out.push_back(std::move(ans));
        }
    }
    return out;
}

// ---- behavior cloning -----------------------------------------------------------

struct BcConfig {
    int epochs = 2;
    int minibatch = 32;
    double lr = 0.5;
    std::uint64_t seed = 1;
};

struct BcStats {
    std::vector<double> epoch_nll;  // mean NLL per epoch, in order
    int skipped_answer_terms = 0;   // answer targets absent from the candidate set
};

/// Mean composite NLL of the dataset under params `p`; if `g` is non-null,
/// accumulates the analytic gradient (of the mean) into it. Answer targets
/// that do not survive candidate enumeration train the decision head only.
inline double bc_loss(const PolicyParams& p, const std::vector<SftExample>& data,
                      const Memory& memory, GradVec* g, int* skipped = nullptr) {
    if (data.empty()) return 0.0;
    const double scale = 1.0 / static_cast<double>(data.size());
    double total = 0.0;
    for (const auto& ex : data) {
        const Forward fw = forward_pass(p, make_view(ex.state), memory, ex.allowed);
        const int k = detail::kind_index(ex.target_kind);
        total -= scale * detail::safe_log(fw.decision.probs[k]);

        std::vector<double> g_dec, g_rew, g_ans;
        if (g) {
            g_dec.assign(2, 0.0);
            for (int j = 0; j < 2; ++j) g_dec[j] = fw.decision.probs[j] - (j == k ? 1.0 : 0.0);
        }

        if (ex.target_kind == ActionKind::Query) {
            total -= scale * detail::safe_log(fw.rewrite.probs[ex.target_template]);
            if (g) {
                g_rew.assign(fw.rewrite.probs.size(), 0.0);
                for (std::size_t j = 0; j < g_rew.size(); ++j)
                    g_rew[j] = fw.rewrite.probs[j] -
                               (static_cast<int>(j) == ex.target_template ? 1.0 : 0.0);
            }
        } else {
            const std::string want = join_tokens(normalize_tokens(ex.target_answer));
            int idx = -1;
            for (std::size_t c = 0; c < fw.candidates.size(); ++c) {
                if (join_tokens(normalize_tokens(fw.candidates[c].text)) == want) {
                    idx = static_cast<int>(c);
                    break;
                }
            }
            if (idx >= 0) {
                total -= scale * detail::safe_log(fw.answer.probs[idx]);
                if (g) {
                    g_ans.assign(fw.answer.probs.size(), 0.0);
                    for (std::size_t j = 0; j < g_ans.size(); ++j)
                        g_ans[j] =
                            fw.answer.probs[j] - (static_cast<int>(j) == idx ? 1.0 : 0.0);
                }
            } else if (skipped) {
                ++*skipped;
            }
        }
        if (g) detail::backprop(p, fw, g_dec, g_rew, g_ans, 0.0, scale, *g);
    }
    return total;
}

inline BcStats behavior_clone(PolicyParams& p, const std::vector<SftExample>& data,
                              const Memory& memory, const BcConfig& cfg) {
    BcStats stats;
    if (data.empty()) return stats;
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);

        double epoch_nll = 0.0;
        for (std::size_t at = 0; at < order.size(); at += cfg.minibatch) {
            const std::size_t end = std::min(order.size(), at + cfg.minibatch);
            std::vector<SftExample> mb;
            mb.reserve(end - at);
            for (std::size_t i = at; i < end; ++i) mb.push_back(data[order[i]]);

            GradVec g = GradVec::zeros_like(p);
            int skipped = 0;
            const double nll = bc_loss(p, mb, memory, &g, &skipped);
            stats.skipped_answer_terms += skipped;
            apply_gradient(p, g, cfg.lr);
            epoch_nll += nll * static_cast<double>(mb.size());
        }
        stats.epoch_nll.push_back(epoch_nll / static_cast<double>(data.size()));
    }
    return stats;
}

// ---- generalized advantage estimation ----------------------------------------

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> value_targets;  // advantage + value, the regression target
};

/// Terminal bootstrap is zero: episodes always end with the final answer.
inline GaeResult compute_gae(const std::vector<double>& rewards,
                             const std::vector<double>& values, double gamma, double lambda) {
    const std::size_t n = rewards.size();
    GaeResult r;
    r.advantages.assign(n, 0.0);
    r.value_targets.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double next_v = (i + 1 < n) ? values[i + 1] : 0.0;
        const double delta = rewards[i] + gamma * next_v - values[i];
        acc = delta + gamma * lambda * acc;
        r.advantages[i] = acc;
        r.value_targets[i] = acc + values[i];
    }
    return r;
}

// ---- rollout collection ---------------------------------------------------------

struct RolloutStep {
    State state;  // state the action was taken in (strings only, cheap to keep)
    std::vector<ActionKind> allowed;
    ActionKind kind = ActionKind::Answer;
    int sub_index = 0;
    std::string text;
    double old_log_prob = 0.0;
    double value = 0.0;  // critic estimate at collection time
    double reward = 0.0;
    double advantage = 0.0;
    double value_target = 0.0;
};

struct RolloutBatch {
    std::vector<RolloutStep> steps;
    int n_episodes = 0;
    double mean_return = 0.0;  // mean discounted episode return (shaped rewards)
};

struct CollectConfig {
    int budget_steps = 5120;
    int n_workers = 1;
    double gae_lambda = 0.95;
    double kl_beta = 0.0;  // reward shaping against a frozen reference policy
};

namespace detail {

/// Composite log prob of a recorded action under arbitrary params. Candidate
/// enumeration is deterministic, so recorded sub indices stay valid.
inline double log_prob_of(const RolloutStep& st, const Forward& fw) {
    double lp = safe_log(fw.decision.probs[kind_index(st.kind)]);
    if (st.kind == ActionKind::Query) {
        lp += safe_log(fw.rewrite.probs[st.sub_index]);
    } else {
        if (st.sub_index < 0 || st.sub_index >= static_cast<int>(fw.answer.probs.size()))
            throw NumericError("recorded candidate index out of range; enumeration drifted");
        lp += safe_log(fw.answer.probs[st.sub_index]);
    }
    return lp;
}

}  // namespace detail

/// Samples questions uniformly with replacement and runs sampled episodes
/// until the step budget is met. Per-episode seeds are drawn up front in
/// episode order and results are appended in that same order, so the output
/// is identical for any worker count.
inline RolloutBatch collect_rollouts(const PolicyParams& params, const Memory& memory,
                                     const RetrieverHandle& retriever,
                                     const std::vector<Question>& questions,
                                     const EnvConfig& env_cfg, const CollectConfig& cfg, Rng& rng,
                                     const PolicyParams* reference = nullptr) {
    if (questions.empty()) throw ConfigError("rollout collection needs at least one question");
    RolloutBatch batch;
    const ScoredPolicy policy(params, memory);
    const int workers = std::max(1, cfg.n_workers);

    double return_sum = 0.0;
    int steps_total = 0;
    bool done = false;
    while (!done) {
        // draw the whole wave from the main stream first so ordering is fixed
        std::vector<std::pair<std::size_t, std::uint64_t>> wave;
        for (int w = 0; w < workers; ++w)
            wave.emplace_back(rng.uniform_int(questions.size()), rng.next_u64());

        std::vector<std::future<Episode>> futs;
        for (const auto& [qi, seed] : wave) {
            const Question& q = questions[qi];
            futs.push_back(std::async(
                workers > 1 ? std::launch::async : std::launch::deferred,
                [&policy, &retriever, &env_cfg, &q, seed]() {
                    Rng ep_rng(seed);
                    return run_episode(q, policy, retriever, env_cfg, ep_rng,
                                       SampleMode::sample());
                }));
        }
        for (auto& fut : futs) {
            Episode ep = fut.get();
            if (done) continue;  // drain remaining futures, keep output prefix-stable

            const std::size_t n = ep.trajectory.steps.size();
            std::vector<double> rewards(n), values(n);
            std::vector<RolloutStep> steps(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& ts = ep.trajectory.steps[i];
                RolloutStep st;
                st.state = std::move(ep.states[i]);
                st.allowed = allowed_action_kinds(st.state, env_cfg);
                st.kind = ts.kind;
                st.sub_index = ts.sub_index;
                st.text = ts.text;
                st.old_log_prob = ts.log_prob;
                st.value = ts.value;
                st.reward = ts.reward;
                if (cfg.kl_beta != 0.0 && reference) {
                    const Forward ref_fw =
                        forward_pass(*reference, make_view(st.state), memory, st.allowed);
                    const double ref_lp = detail::log_prob_of(st, ref_fw);
                    st.reward -= cfg.kl_beta * (st.old_log_prob - ref_lp);
                }
                rewards[i] = st.reward;
                values[i] = st.value;
                steps[i] = std::move(st);
            }
            const GaeResult gae = compute_gae(rewards, values, env_cfg.gamma, cfg.gae_lambda);
            for (std::size_t i = 0; i < n; ++i) {
                steps[i].advantage = gae.advantages[i];
                steps[i].value_target = gae.value_targets[i];
                batch.steps.push_back(std::move(steps[i]));
            }
            ++batch.n_episodes;
            return_sum += discounted_return(rewards, env_cfg.gamma);
            steps_total += static_cast<int>(n);
            if (steps_total >= cfg.budget_steps) done = true;
        }
    }
    batch.mean_return = batch.n_episodes ? return_sum / batch.n_episodes : 0.0;
    return batch;
}

// ---- clipped surrogate update -----------------------------------------------------

struct PpoConfig {
    double lr = 0.02;
    double clip = 0.2;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    int epochs = 4;
    int minibatch = 64;
    bool normalize_advantage = true;
    std::uint64_t seed = 7;
};

struct PpoStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;      // mean(old logp - new logp)
    double clip_fraction = 0.0;  // steps where the clipped branch was active
};

/// Total loss over `steps` under params `p`:
///   mean(-min(ratio A, clip(ratio) A)) + value_coef * mean(0.5 (V - target)^2)
///   - entropy_coef * mean(joint entropy).
/// Joint entropy decomposes as H(kind) + sum_k p(kind) H(sub | kind). When the
/// clipped branch is strictly smaller, the policy term contributes zero
/// gradient; ties take the unclipped subgradient. If `g` is non-null the
/// analytic gradient of the mean loss accumulates into it.
inline PpoStats ppo_loss(const PolicyParams& p, const std::vector<const RolloutStep*>& steps,
                         const Memory& memory, const PpoConfig& cfg, GradVec* g) {
    PpoStats st;
    if (steps.empty()) return st;
    const double scale = 1.0 / static_cast<double>(steps.size());

    for (const RolloutStep* sp : steps) {
        const RolloutStep& step = *sp;
        const Forward fw = forward_pass(p, make_view(step.state), memory, step.allowed);
        const double new_lp = detail::log_prob_of(step, fw);
        st.approx_kl += scale * (step.old_log_prob - new_lp);

        // policy term
        const double log_ratio = std::clamp(new_lp - step.old_log_prob, -30.0, 30.0);
        const double ratio = std::exp(log_ratio);
        const double a = step.advantage;
        const double u = ratio * a;
        const double v = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * a;
        st.policy_loss += scale * -std::min(u, v);
        if (u > v) st.clip_fraction += scale;
        const double dlogp = (u <= v) ? -a * ratio : 0.0;

        // value term
        const double verr = fw.value - step.value_target;
        st.value_loss += scale * 0.5 * verr * verr;

        // joint entropy
        const double h_dec = detail::entropy_of(fw.decision.probs);
        const double h_ans = detail::entropy_of(fw.answer.probs);
        const double h_rew = detail::entropy_of(fw.rewrite.probs);
        const double p_ans = fw.decision.probs[0], p_qry = fw.decision.probs[1];
        st.entropy += scale * (h_dec + p_ans * h_ans + p_qry * h_rew);

        if (!g) continue;

        const int k = detail::kind_index(step.kind);
        std::vector<double> g_dec(2, 0.0), g_rew(fw.rewrite.probs.size(), 0.0),
            g_ans(fw.answer.probs.size(), 0.0);

        // d logp / d logits, weighted by the surrogate coefficient
        for (int j = 0; j < 2; ++j)
            g_dec[j] += dlogp * ((j == k ? 1.0 : 0.0) - fw.decision.probs[j]);
        if (step.kind == ActionKind::Query) {
            for (std::size_t j = 0; j < g_rew.size(); ++j)
                g_rew[j] += dlogp * ((static_cast<int>(j) == step.sub_index ? 1.0 : 0.0) -
                                     fw.rewrite.probs[j]);
        } else {
            for (std::size_t j = 0; j < g_ans.size(); ++j)
                g_ans[j] += dlogp * ((static_cast<int>(j) == step.sub_index ? 1.0 : 0.0) -
                                     fw.answer.probs[j]);
        }

        // entropy bonus: loss has -entropy_coef * H, so add -coef * dH/dlogit
        const double ec = cfg.entropy_coef;
        const double h_sub_mean = p_ans * h_ans + p_qry * h_rew;
        const double h_sub[2] = {h_ans, h_rew};
        for (int j = 0; j < 2; ++j) {
            const double pj = fw.decision.probs[j];
            if (pj <= 0.0) continue;
            const double dh = -pj * (std::log(pj) + h_dec) + pj * (h_sub[j] - h_sub_mean);
            g_dec[j] += -ec * dh;
        }
        for (std::size_t j = 0; j < g_ans.size(); ++j) {
            const double q = fw.answer.probs[j];
            if (q <= 0.0) continue;
            g_ans[j] += -ec * p_ans * (-q * (std::log(q) + h_ans));
        }
        for (std::size_t j = 0; j < g_rew.size(); ++j) {
            const double q = fw.rewrite.probs[j];
            if (q <= 0.0) continue;
            g_rew[j] += -ec * p_qry * (-q * (std::log(q) + h_rew));
        }

        const double g_val = cfg.value_coef * verr;
        detail::backprop(p, fw, g_dec, g_rew, g_ans, g_val, scale, *g);
    }
    return st;
}

inline double ppo_total_loss(const PpoStats& st, const PpoConfig& cfg) {
    return st.policy_loss + cfg.value_coef * st.value_loss - cfg.entropy_coef * st.entropy;
}

/// Normalizes advantages in place across the whole batch (mean 0, unit std).
inline void normalize_advantages(RolloutBatch& batch) {
    if (batch.steps.empty()) return;
    double mean = 0.0;
    for (const auto& s : batch.steps) mean += s.advantage;
    mean /= static_cast<double>(batch.steps.size());
    double var = 0.0;
    for (const auto& s : batch.steps) var += (s.advantage - mean) * (s.advantage - mean);
    var /= static_cast<double>(batch.steps.size());
    const double sd = std::sqrt(var) + 1e-8;
    for (auto& s : batch.steps) s.advantage = (s.advantage - mean) / sd;
}

/// Shuffled minibatch epochs over the batch; the short final minibatch is
/// kept. Stats are averaged over every minibatch pass, weighted by size.
inline PpoStats ppo_update(PolicyParams& p, RolloutBatch& batch, const Memory& memory,
                           const PpoConfig& cfg) {
    PpoStats agg;
    if (batch.steps.empty()) return agg;
    if (cfg.normalize_advantage) normalize_advantages(batch);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(batch.steps.size());
    std::iota(order.begin(), order.end(), 0);
    double weight_total = 0.0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);

        for (std::size_t at = 0; at < order.size(); at += cfg.minibatch) {
            const std::size_t end = std::min(order.size(), at + cfg.minibatch);
            std::vector<const RolloutStep*> mb;
            mb.reserve(end - at);
            for (std::size_t i = at; i < end; ++i) mb.push_back(&batch.steps[order[i]]);

            GradVec g = GradVec::zeros_like(p);
            const PpoStats st = ppo_loss(p, mb, memory, cfg, &g);
            apply_gradient(p, g, cfg.lr);

            const double w = static_cast<double>(mb.size());
            agg.policy_loss += w * st.policy_loss;
            agg.value_loss += w * st.value_loss;
            agg.entropy += w * st.entropy;
            agg.approx_kl += w * st.approx_kl;
            agg.clip_fraction += w * st.clip_fraction;
            weight_total += w;
        }
    }
    agg.policy_loss /= weight_total;
    agg.value_loss /= weight_total;
    agg.entropy /= weight_total;
    agg.approx_kl /= weight_total;
    agg.clip_fraction /= weight_total;
    return agg;
}

}  // namespace rdlab
