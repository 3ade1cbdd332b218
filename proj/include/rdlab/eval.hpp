#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdlab/common.hpp"
#include "rdlab/env.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/policy.hpp"
#include "rdlab/retriever.hpp"

namespace rdlab {

/// Aggregate quality of one policy over a question set. em/f1/hit/
/// retrieval_pct are percentages; mean_reward is the mean discounted episode
/// return in raw reward units. hit is counted over episodes that retrieved at
/// least once (an episode that never queried can neither hit nor miss).
struct EvalReport {
    double em = 0.0;
    double f1 = 0.0;
    double hit = 0.0;
    double retrieval_pct = 0.0;
    double mean_reward = 0.0;
    int n = 0;
};

/// One deterministic rollout per question under any PolicyHandle. The rng only
/// matters when mode actually samples; greedy and threshold decodes ignore it.
inline EvalReport evaluate_with(const PolicyHandle& policy, const std::vector<Question>& questions,
                                const RetrieverHandle& retriever, const EnvConfig& env_cfg,
                                SampleMode mode, std::uint64_t seed = 0) {
    Rng rng(sub_seed(seed, "eval"));
    EvalReport rep;
    rep.n = static_cast<int>(questions.size());
    if (questions.empty()) return rep;

    int retrieved = 0, hits = 0;
    double em = 0.0, f1 = 0.0, reward = 0.0;
    for (const auto& q : questions) {
        const Episode ep = run_episode(q, policy, retriever, env_cfg, rng, mode);
        em += exact_match(ep.trajectory.final_answer, q.gold_answers);
        f1 += token_f1(ep.trajectory.final_answer, q.gold_answers);
        reward += ep.trajectory.total_return;

        // the state before the final step holds every observation gathered
        const State& last = ep.states.back();
        if (!last.observations.empty()) {
            ++retrieved;
            bool found = false;
            for (const auto& obs : last.observations)
                found = found || hit(obs.concatenated_text, q.gold_answers);
            hits += found ? 1 : 0;
        }
    }
    const double n = static_cast<double>(rep.n);
    rep.em = 100.0 * em / n;
    rep.f1 = 100.0 * f1 / n;
    rep.retrieval_pct = 100.0 * retrieved / n;
    rep.hit = retrieved > 0 ? 100.0 * hits / retrieved : 0.0;
    rep.mean_reward = reward / n;
    return rep;
}

inline EvalReport evaluate(const PolicyParams& params, const std::vector<Question>& questions,
                           const Memory& memory, const RetrieverHandle& retriever,
                           const EnvConfig& env_cfg, SampleMode mode = SampleMode::greedy(),
                           std::uint64_t seed = 0) {
    return evaluate_with(ScoredPolicy(params, memory), questions, retriever, env_cfg, mode, seed);
}

// ---- threshold sweep --------------------------------------------------------

struct SweepPoint {
    double tau = 0.0;
    EvalReport report;
};

/// Probability thresholds covering the observed spread of step-0 answer
/// probabilities, padded so the first point answers everything and the last
/// point retrieves everything. The decode rule answers iff P(answer) > tau,
/// so retrieval_pct is exactly the fraction of questions with P0 <= tau:
/// non-decreasing in tau by construction.
inline std::vector<double> default_sweep_taus(const PolicyParams& params,
                                              const std::vector<Question>& questions,
                                              const Memory& memory, int n_points = 41) {
    if (n_points < 2) throw ConfigError("threshold sweep needs at least two points");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const std::vector<ActionKind> both = {ActionKind::Answer, ActionKind::Query};
    for (const auto& q : questions) {
        const State s = new_state(q);
        const Forward fw = forward_pass(params, make_view(s), memory, both);
        lo = std::min(lo, fw.decision.probs[0]);
        hi = std::max(hi, fw.decision.probs[0]);
    }
    if (questions.empty()) { lo = 0.0; hi = 1.0; }
    const double pad = std::max(1e-6, (hi - lo) * 0.05);
    const double start = lo - pad;
    std::vector<double> taus(n_points);
    for (int i = 0; i < n_points; ++i)
        taus[i] = start + (hi - start) * i / (n_points - 1);
    return taus;
}

inline std::vector<SweepPoint> threshold_sweep(const PolicyParams& params,
                                               const std::vector<Question>& questions,
                                               const Memory& memory,
                                               const RetrieverHandle& retriever,
                                               const EnvConfig& env_cfg,
                                               const std::vector<double>& taus) {
    std::vector<SweepPoint> out;
    out.reserve(taus.size());
    for (const double tau : taus) {
        SweepPoint pt;
        pt.tau = tau;
        pt.report = evaluate(params, questions, memory, retriever, env_cfg,
                             SampleMode::prob_threshold(tau));
        out.push_back(std::move(pt));
    }
    return out;
}

inline std::vector<SweepPoint> threshold_sweep(const PolicyParams& params,
                                               const std::vector<Question>& questions,
                                               const Memory& memory,
                                               const RetrieverHandle& retriever,
                                               const EnvConfig& env_cfg, int n_points = 41) {
    return threshold_sweep(params, questions, memory, retriever, env_cfg,
                           default_sweep_taus(params, questions, memory, n_points));
}

// ---- per-category transfer report --------------------------------------------

/// Per-category breakdown at a fixed decode. Meant for running a policy
/// against a world it was not trained on: the category labels say where the
/// behavior carried over. Categories with no questions are simply absent.
struct TransferReport {
    std::map<std::string, EvalReport> by_category;
    EvalReport overall;
    double tau = 0.5;
};

inline TransferReport transfer_report(const PolicyParams& params,
                                      const std::vector<Question>& questions,
                                      const Memory& memory,
                                      const std::map<std::string, std::string>& categories,
                                      const RetrieverHandle& retriever, const EnvConfig& env_cfg,
                                      double tau = 0.5) {
    std::map<std::string, std::vector<Question>> buckets;
    for (const auto& q : questions) {
        const auto it = categories.find(q.id);
        if (it == categories.end()) throw ConfigError("question " + q.id + " has no category");
        buckets[it->second].push_back(q);
    }
    TransferReport rep;
    rep.tau = tau;
    const SampleMode mode = SampleMode::prob_threshold(tau);
    for (const auto& [cat, qs] : buckets)
        rep.by_category[cat] = evaluate(params, qs, memory, retriever, env_cfg, mode);
    rep.overall = evaluate(params, questions, memory, retriever, env_cfg, mode);
    return rep;
}

// ---- ablations ----------------------------------------------------------------

/// Same decision and answer behavior, but every issued query is the verbatim
/// question. Isolates how much the learned rewrite choice contributes.
class VerbatimQueryPolicy final : public PolicyHandle {
  public:
    VerbatimQueryPolicy(const PolicyParams& params, const Memory& memory)
        : params_(&params), memory_(&memory) {}

    ActionSample act(const StateView& view, const std::vector<ActionKind>& allowed,
                     SampleMode mode, Rng& rng) const override {
        const Forward fw = forward_pass(*params_, view, *memory_, allowed);
        const bool query_allowed = kind_allowed(allowed, ActionKind::Query);

        ActionKind kind = ActionKind::Answer;
        switch (mode.kind) {
            case SampleMode::Kind::Sample:
                kind = detail::sample_index(fw.decision.probs, rng) == 1 ? ActionKind::Query
                                                                         : ActionKind::Answer;
                break;
            case SampleMode::Kind::Greedy:
                kind = fw.decision.probs[1] > fw.decision.probs[0] ? ActionKind::Query
                                                                   : ActionKind::Answer;
                break;
            case SampleMode::Kind::Threshold:
                kind = (!query_allowed || fw.decision.logits[0] > mode.tau) ? ActionKind::Answer
                                                                            : ActionKind::Query;
                break;
            case SampleMode::Kind::ProbThreshold:
                kind = (!query_allowed || fw.decision.probs[0] > mode.tau) ? ActionKind::Answer
                                                                           : ActionKind::Query;
                break;
        }

        ActionSample out;
        out.value = fw.value;
        out.features_digest = fw.digest;
        double logp = detail::safe_log(fw.decision.probs[kind == ActionKind::Query ? 1 : 0]);
        if (kind == ActionKind::Query) {
            const std::size_t t = static_cast<std::size_t>(RewriteTemplate::Identity);
            out.action = {ActionKind::Query,
                          apply_template(RewriteTemplate::Identity, *view.question_text)};
            out.sub_index = static_cast<int>(t);
            logp += detail::safe_log(fw.rewrite.probs[t]);
        } else {
            std::size_t c;
            if (mode.kind == SampleMode::Kind::Sample) c = detail::sample_index(fw.answer.probs, rng);
            else c = detail::argmax(fw.answer.probs);
            out.action = {ActionKind::Answer, fw.candidates[c].text};
            out.sub_index = static_cast<int>(c);
            logp += detail::safe_log(fw.answer.probs[c]);
        }
        out.log_prob = logp;
        return out;
    }

  private:
    const PolicyParams* params_;
    const Memory* memory_;
};

inline EvalReport ablation_replace_query(const PolicyParams& params,
                                         const std::vector<Question>& questions,
                                         const Memory& memory, const RetrieverHandle& retriever,
                                         const EnvConfig& env_cfg,
                                         SampleMode mode = SampleMode::greedy()) {
    return evaluate_with(VerbatimQueryPolicy(params, memory), questions, retriever, env_cfg, mode);
}

/// Trained policy with its answer head swapped for another checkpoint's
/// (typically the warm-up one). Decision and rewrite heads are untouched, so
/// the query stream is identical and any change in em/f1 is attributable to
/// answer selection. With a hidden trunk the donor head is reused on the
/// trained trunk's representation; with the default linear policy the swap is
/// exact.
inline PolicyParams splice_answer_head(const PolicyParams& trained, const PolicyParams& donor) {
    const auto& a = trained.config;
    const auto& b = donor.config;
    if (a.dim != b.dim || a.cand_hash_dim != b.cand_hash_dim || a.hidden_dim != b.hidden_dim ||
        a.n_templates != b.n_templates || a.hash_seed != b.hash_seed)
        throw ConfigError("answer head donor has an incompatible policy configuration");
    PolicyParams out = trained;
    out.w_ans = donor.w_ans;
    return out;
}

inline EvalReport ablation_replace_generator(const PolicyParams& trained,
                                             const PolicyParams& donor,
                                             const std::vector<Question>& questions,
                                             const Memory& memory,
                                             const RetrieverHandle& retriever,
                                             const EnvConfig& env_cfg,
                                             SampleMode mode = SampleMode::greedy()) {
    return evaluate(splice_answer_head(trained, donor), questions, memory, retriever, env_cfg,
                    mode);
}

// ---- brute-force plan oracle ---------------------------------------------------

/// Best depth<=1 plan for one question: answer immediately with some step-0
/// candidate, or issue one rewrite and answer with some post-retrieval
/// candidate. Valued with the environment's own reward and discounting.
struct OraclePlan {
    bool used_query = false;
    int template_index = -1;  // -1 when no query was issued
    int answer_index = 0;     // candidate index within its step's enumeration
    std::string answer;
    double value = -std::numeric_limits<double>::infinity();
};

inline OraclePlan brute_force_optimal(const Question& q, const Memory& memory,
                                      const PolicyConfig& policy_cfg,
                                      const RetrieverHandle& retriever, const EnvConfig& env_cfg) {
    const RewardConfig rcfg{env_cfg.alpha, env_cfg.gamma, 0.0};
    const State start = new_state(q);
    const auto step0 = enumerate_candidates(make_view(start), memory, policy_cfg);

    std::size_t plan_count = step0.size();
    OraclePlan best;

    // canonical order (answers first, then template-major) + strict improvement
    // make ties resolve to fewer queries, then the lower template, then the
    // lower candidate index
    for (std::size_t c = 0; c < step0.size(); ++c) {
        const double v = step_reward({ActionKind::Answer, step0[c].text}, q, rcfg);
        if (v > best.value) {
            best = {false, -1, static_cast<int>(c), step0[c].text, v};
        }
    }
    if (env_cfg.quota_n < 1) return best;

    for (int t = 0; t < policy_cfg.n_templates; ++t) {
        const std::string query =
            apply_template(static_cast<RewriteTemplate>(t), q.text);
        State after = start;
        after.observations.push_back(retriever.retrieve(query, env_cfg.top_k));
        const auto step1 = enumerate_candidates(make_view(after), memory, policy_cfg);
        plan_count += step1.size();
        if (plan_count > 10000)
            throw ConfigError("brute-force plan space exceeds 10000 for question " + q.id);
        for (std::size_t c = 0; c < step1.size(); ++c) {
            const std::vector<double> rewards = {
                -env_cfg.alpha, step_reward({ActionKind::Answer, step1[c].text}, q, rcfg)};
            const double v = discounted_return(rewards, env_cfg.gamma);
            if (v > best.value) {
                best = {true, t, static_cast<int>(c), step1[c].text, v};
            }
        }
    }
    return best;
}

/// Executes a plan against the real transition and reward rules and returns
/// its discounted return. Agreement with OraclePlan::value is exact, which is
/// what the oracle self-check relies on.
inline double replay_plan_value(const OraclePlan& plan, const Question& q,
                                const RetrieverHandle& retriever, const EnvConfig& env_cfg) {
    const RewardConfig rcfg{env_cfg.alpha, env_cfg.gamma, 0.0};
    std::vector<double> rewards;
    State s = new_state(q);
    if (plan.used_query) {
        const Action query{ActionKind::Query,
                           apply_template(static_cast<RewriteTemplate>(plan.template_index),
                                          q.text)};
        rewards.push_back(step_reward(query, q, rcfg));
        StepOutcome out = apply_action(s, query, retriever, env_cfg);
        s = std::move(std::get<Continue>(out).next_state);
    }
    const Action answer{ActionKind::Answer, plan.answer};
    rewards.push_back(step_reward(answer, q, rcfg));
    apply_action(s, answer, retriever, env_cfg);  // legality check only
    return discounted_return(rewards, env_cfg.gamma);
}

struct OracleResult {
    std::vector<OraclePlan> plans;  // one per question, in question order
    double mean_value = 0.0;
};

inline OracleResult brute_force_all(const std::vector<Question>& questions, const Memory& memory,
                                    const PolicyConfig& policy_cfg,
                                    const RetrieverHandle& retriever, const EnvConfig& env_cfg) {
    OracleResult out;
    out.plans.reserve(questions.size());
    double acc = 0.0;
    for (const auto& q : questions) {
        out.plans.push_back(brute_force_optimal(q, memory, policy_cfg, retriever, env_cfg));
        acc += out.plans.back().value;
    }
    if (!questions.empty()) out.mean_value = acc / static_cast<double>(questions.size());
    return out;
}

// ---- report serialization -------------------------------------------------------

inline nlohmann::json report_to_json(const EvalReport& r) {
    return nlohmann::json{{"em", r.em},
                          {"f1", r.f1},
                          {"hit", r.hit},
                          {"retrieval_pct", r.retrieval_pct},
                          {"mean_reward", r.mean_reward},
                          {"n", r.n}};
}

inline nlohmann::json transfer_to_json(const TransferReport& r) {
    nlohmann::json by_cat = nlohmann::json::object();
    for (const auto& [cat, rep] : r.by_category) by_cat[cat] = report_to_json(rep);
    return nlohmann::json{{"tau", r.tau}, {"overall", report_to_json(r.overall)},
                          {"by_category", by_cat}};
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "tau,em,f1,hit,retrieval_pct,mean_reward,n\n";
    for (const auto& pt : points) {
        out << fmt_double(pt.tau) << ',' << fmt_double(pt.report.em) << ','
            << fmt_double(pt.report.f1) << ',' << fmt_double(pt.report.hit) << ','
            << fmt_double(pt.report.retrieval_pct) << ',' << fmt_double(pt.report.mean_reward)
            << ',' << pt.report.n << '\n';
    }
    if (!out) throw IoError("failed while writing " + path);
}

inline std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "tau,em,f1,hit,retrieval_pct,mean_reward,n")
        throw IoError("unrecognized sweep header in " + path);
    std::vector<SweepPoint> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SweepPoint pt;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        if (!(row >> pt.tau >> pt.report.em >> pt.report.f1 >> pt.report.hit >>
              pt.report.retrieval_pct >> pt.report.mean_reward >> pt.report.n))
            throw IoError("malformed sweep row in " + path);
        out.push_back(pt);
    }
    return out;
}

}  // namespace rdlab
