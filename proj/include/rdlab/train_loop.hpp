#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "rdlab/eval.hpp"
#include "rdlab/training.hpp"

namespace rdlab {

/// Everything one training run needs besides the data. Stage seeds are
/// derived from `seed`, so a run is reproducible from this struct alone.
struct TrainLoopConfig {
    PolicyConfig policy;
    EnvConfig env;
    WarmupConfig warmup;
    BcConfig bc;
    CollectConfig collect;
    PpoConfig ppo;
    int iterations = 20;
    int eval_every = 1;  // evaluate after every n-th iteration; 0 = never
    std::uint64_t seed = 1;
};

struct IterationStats {
    int iter = 0;
    double mean_return = 0.0;  // sampled collection batches, shaped rewards
    PpoStats ppo;
    bool evaluated = false;
    EvalReport eval;  // greedy decode on the training questions
};

struct TrainResult {
    PolicyParams params;
    PolicyParams warmup_params;  // post-warm-up snapshot (ablation donor, KL reference)
    BcStats bc;
    std::vector<IterationStats> iterations;
};

/// Called after every iteration with the freshly updated parameters; wire up
/// checkpoint writers or live metrics here.
using IterationCallback = std::function<void(const IterationStats&, const PolicyParams&)>;

/// Warm-up behavior cloning followed by clipped-surrogate iterations:
/// collect sampled rollouts, update, optionally evaluate greedily. When the
/// collector's kl_beta is non-zero the post-warm-up snapshot serves as the
/// frozen reference.
inline TrainResult train_loop(const std::vector<Question>& questions, const Memory& memory,
                              const RetrieverHandle& retriever,
                              const std::function<RewriteTemplate(const Question&)>& oracle,
                              const TrainLoopConfig& cfg,
                              const IterationCallback& on_iteration = {}) {
    if (cfg.iterations < 0) throw ConfigError("iterations must be >= 0");
    TrainResult out;
    out.params = init_params(cfg.policy);

    const auto data = build_warmup_dataset(questions, memory, retriever, cfg.env, oracle,
                                           cfg.warmup);
    BcConfig bc_cfg = cfg.bc;
    bc_cfg.seed = sub_seed(cfg.seed, "bc");
    out.bc = behavior_clone(out.params, data, memory, bc_cfg);
    out.warmup_params = out.params;

    const PolicyParams* reference = cfg.collect.kl_beta != 0.0 ? &out.warmup_params : nullptr;
    for (int it = 0; it < cfg.iterations; ++it) {
        Rng collect_rng(sub_seed(cfg.seed, "collect:" + std::to_string(it)));
        RolloutBatch batch = collect_rollouts(out.params, memory, retriever, questions, cfg.env,
                                              cfg.collect, collect_rng, reference);

        PpoConfig ppo_cfg = cfg.ppo;
        ppo_cfg.seed = sub_seed(cfg.seed, "ppo:" + std::to_string(it));

        IterationStats stats;
        stats.iter = it;
        stats.mean_return = batch.mean_return;
        stats.ppo = ppo_update(out.params, batch, memory, ppo_cfg);
        if (cfg.eval_every > 0 && (it + 1) % cfg.eval_every == 0) {
            stats.evaluated = true;
            stats.eval = evaluate(out.params, questions, memory, retriever, cfg.env);
        }
        if (on_iteration) on_iteration(stats, out.params);
        out.iterations.push_back(std::move(stats));
    }
    return out;
}

// ---- metrics log -----------------------------------------------------------------

inline const char* metrics_csv_header() {
    return "iter,mean_reward,kl,policy_loss,value_loss,entropy,eval_em,eval_f1,eval_hit,"
           "retrieval_pct";
}

inline std::string metrics_csv_row(const IterationStats& s) {
    std::string row = std::to_string(s.iter);
    for (const double v : {s.mean_return, s.ppo.approx_kl, s.ppo.policy_loss, s.ppo.value_loss,
                           s.ppo.entropy}) {
        row += ',';
        row += fmt_double(v);
    }
    if (s.evaluated) {
        for (const double v : {s.eval.em, s.eval.f1, s.eval.hit, s.eval.retrieval_pct}) {
            row += ',';
            row += fmt_double(v);
        }
    } else {
        row += ",,,,";  // evaluation skipped this iteration
    }
    return row;
}

inline void write_metrics_csv(const std::string& path, const std::vector<IterationStats>& stats) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << metrics_csv_header() << '\n';
    for (const auto& s : stats) out << metrics_csv_row(s) << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace rdlab
