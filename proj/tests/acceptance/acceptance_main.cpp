// End-to-end acceptance checks. Each criterion prints indented detail lines
// followed by one PASS/FAIL verdict line; the process exits nonzero if any
// criterion fails. Training-based criteria run across five fixed seeds and
// pass when at least four agree (three for the retrieval-volume sub-check of
// criterion 9, which is the noisiest comparison).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../helpers.hpp"
#include "rdlab/cli.hpp"
#include "rdlab/eval.hpp"
#include "rdlab/train_loop.hpp"
#include "rdlab/training.hpp"
#include "rdlab/world.hpp"

using namespace rdlab;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances and budgets -------------------------------------------------

constexpr double kUnitTol = 1e-9;        // criterion 1: unit value agreement
constexpr int kOracleWorlds = 100;       // criterion 2: tiny worlds replayed
constexpr double kNaiveSumTol = 1e-12;   // criterion 2: discount vs power series
constexpr int kFdPerKind = 25;           // criterion 3: 25 warm-up + 25 surrogate
constexpr double kFdTol = 1e-4;          // criterion 3: relative gradient gap
constexpr double kMaxIdleRetrPct = 5.0;  // criterion 4a: retrieval on useless corpus
constexpr double kEmSlackPts = 2.0;      // criterion 4a: accuracy vs forced-answer
constexpr double kHitDropPts = 20.0;     // criterion 5: verbatim-query hit loss
constexpr int kSeeds = 5;                // criteria 4-9: fixed seeds 1..5
constexpr int kNeedSeeds = 4;            // pass bar for seed-based criteria
constexpr int kNeedSeedsRetrVolume = 3;  // criterion 9 retrieval-volume bar

// Shared training recipe for every learned policy in this suite.
TrainLoopConfig accept_train(std::uint64_t seed) {
    TrainLoopConfig cfg;
    cfg.seed = seed;
    cfg.iterations = 20;
    cfg.collect.budget_steps = 1024;
    cfg.collect.n_workers = 4;
    cfg.bc.epochs = 32;
    cfg.eval_every = 0;
    return cfg;
}

struct Run {
    World w;
    Index idx;
    TrainResult r;
};

Run train_on(WorldSpec spec, TrainLoopConfig cfg) {
    Run out;
    out.w = gen_world(spec);
    out.idx = build_index(out.w.corpus);
    IndexRetriever retr(out.idx);
    const RewriteOracle oracle{out.w.oracle_map, 0.7, spec.seed};
    out.r = train_loop(out.w.questions, out.w.memory, retr, oracle, cfg);
    return out;
}

WorldSpec spec_mixed(std::uint64_t seed) {
    WorldSpec s;
    s.n_questions = 96;
    s.p_covered = 0.7;
    s.p_known = 0.3;
    s.seed = seed;
    return s;
}

WorldSpec spec_uncovered(std::uint64_t seed) {
    WorldSpec s;
    s.n_questions = 96;
    s.p_covered = 0.0;
    s.seed = seed;
    return s;
}

WorldSpec spec_ambiguous(std::uint64_t seed) {
    WorldSpec s;
    s.n_questions = 96;
    s.p_covered = 1.0;
    s.p_known = 0.2;
    s.p_ambiguous = 0.8;
    s.p_deep = 0.0;
    s.seed = seed;
    return s;
}

WorldSpec spec_deep(std::uint64_t seed) {
    WorldSpec s;
    s.n_questions = 96;
    s.p_covered = 1.0;
    s.p_known = 0.2;
    s.p_ambiguous = 0.0;
    s.p_deep = 0.9;
    s.seed = seed;
    return s;
}

// Expensive artifacts, built once per seed and shared across criteria.
Run& mixed_filtered(std::uint64_t seed) {
    static std::map<std::uint64_t, Run> cache;
    auto it = cache.find(seed);
    if (it == cache.end()) it = cache.emplace(seed, train_on(spec_mixed(seed), accept_train(seed))).first;
    return it->second;
}

Run& mixed_plain(std::uint64_t seed) {
    static std::map<std::uint64_t, Run> cache;
    auto it = cache.find(seed);
    if (it == cache.end()) {
        auto cfg = accept_train(seed);
        cfg.warmup.style = WarmupStyle::Plain;
        it = cache.emplace(seed, train_on(spec_mixed(seed), cfg)).first;
    }
    return it->second;
}

Run& ambiguous_run(std::uint64_t seed) {
    static std::map<std::uint64_t, Run> cache;
    auto it = cache.find(seed);
    if (it == cache.end())
        it = cache.emplace(seed, train_on(spec_ambiguous(seed), accept_train(seed))).first;
    return it->second;
}

EvalReport greedy_eval(const Run& run, const PolicyParams& params, EnvConfig env = {}) {
    IndexRetriever retr(run.idx);
    return evaluate(params, run.w.questions, run.w.memory, retr, env);
}

int pass_count(const std::vector<bool>& per_seed) {
    int n = 0;
    for (bool b : per_seed) n += b;
    return n;
}

// ---- criterion 1: reward and metric unit values ------------------------------------

bool criterion_unit_values() {
    const RewardConfig rcfg;  // alpha 0.2, gamma 0.99
    const Question q{"q", "who produced 9?", {"shane acker"}};

    const double r_query = step_reward({ActionKind::Query, "anything"}, q, rcfg);
    const double r_exact = step_reward({ActionKind::Answer, "shane acker"}, q, rcfg);
    const double r_miss = step_reward({ActionKind::Answer, "tim burton"}, q, rcfg);
    const double r_part = step_reward({ActionKind::Answer, "shane"}, q, rcfg);

    const double d_hit = discounted_return({2.0}, 0.99);
    const double d_zero = discounted_return({0.0}, 0.99);
    const double d_lookup = discounted_return({-0.2, 2.0}, 0.99);
    const double f1 = token_f1("the cat sat", {"cat sat down"});

    bool ok = true;
    ok &= std::fabs(r_query + 0.2) < kUnitTol;
    ok &= std::fabs(r_exact - 2.0) < kUnitTol;
    ok &= std::fabs(r_miss) < kUnitTol;
    ok &= r_part > 0.0 && r_part < 2.0;
    ok &= std::fabs(d_hit - 2.0) < kUnitTol;
    ok &= std::fabs(d_zero) < kUnitTol;
    ok &= std::fabs(d_lookup - 1.78) < kUnitTol;
    ok &= std::fabs(f1 - 0.8) < kUnitTol;
    std::printf("  query %.3f  exact %.3f  miss %.3f  partial %.3f  lookup-return %.4f  f1 %.3f\n",
                r_query, r_exact, r_miss, r_part, d_lookup, f1);
    return ok;
}

// ---- criterion 2: oracle plans replay exactly --------------------------------------

/// Replays one precomputed plan verbatim through the episode runner.
struct ScriptedPlanPolicy final : PolicyHandle {
    const OraclePlan* plan;
    explicit ScriptedPlanPolicy(const OraclePlan& p) : plan(&p) {}
    ActionSample act(const StateView& view, const std::vector<ActionKind>&, SampleMode,
                     Rng&) const override {
        ActionSample s;
        if (plan->used_query && view.observations->empty()) {
            s.action = {ActionKind::Query,
                        apply_template(static_cast<RewriteTemplate>(plan->template_index),
                                       *view.question_text)};
            s.sub_index = plan->template_index;
        } else {
            s.action = {ActionKind::Answer, plan->answer};
            s.sub_index = plan->answer_index;
        }
        return s;
    }
};

bool criterion_oracle_replay() {
    PolicyConfig pc;
    pc.dim = 32;
    pc.cand_hash_dim = 8;
    const EnvConfig env;
    int replay_bad = 0, naive_bad = 0;
    for (int i = 0; i < kOracleWorlds; ++i) {
        WorldSpec spec;
        spec.n_questions = 4 + i % 7;  // 4..10 questions
        spec.seed = 1000 + i;
        const World w = gen_world(spec);
        const Index idx = build_index(w.corpus);
        const IndexRetriever retr(idx);
        for (const auto& q : w.questions) {
            const OraclePlan plan = brute_force_optimal(q, w.memory, pc, retr, env);
            const ScriptedPlanPolicy pol(plan);
            Rng rng(1);
            const Episode ep = run_episode(q, pol, retr, env, rng, SampleMode::greedy());
            std::vector<double> rewards;
            for (const auto& st : ep.trajectory.steps) rewards.push_back(st.reward);
            if (discounted_return(rewards, env.gamma) != plan.value) ++replay_bad;
            if (std::fabs(discounted_return(rewards, env.gamma) -
                          testutil::naive_discounted(rewards, env.gamma)) > kNaiveSumTol)
                ++naive_bad;
        }
    }
    std::printf("  %d worlds  replay mismatches %d  naive-sum mismatches %d\n", kOracleWorlds,
                replay_bad, naive_bad);
    return replay_bad == 0 && naive_bad == 0;
}

// ---- criterion 3: analytic gradients match finite differences ----------------------

void randomize(PolicyParams& p, std::uint64_t seed, double span = 0.6) {
    Rng rng(seed);
    for (auto* w : {&p.w_dec, &p.w_rew, &p.w_ans, &p.w_val, &p.w_hid})
        for (auto& x : *w) x = (rng.uniform() - 0.5) * span;
}

template <typename LossFn>
double fd_gap(PolicyParams& p, const GradVec& g, LossFn&& loss, double eps = 1e-5) {
    std::vector<double> analytic, numeric;
    auto sweep = [&](std::vector<double>& w, const std::vector<double>& gw) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double keep = w[i];
            w[i] = keep + eps;
            const double lp = loss();
            w[i] = keep - eps;
            const double lm = loss();
            w[i] = keep;
            numeric.push_back((lp - lm) / (2.0 * eps));
            analytic.push_back(gw[i]);
        }
    };
    sweep(p.w_dec, g.w_dec);
    sweep(p.w_rew, g.w_rew);
    sweep(p.w_ans, g.w_ans);
    sweep(p.w_val, g.w_val);
    sweep(p.w_hid, g.w_hid);
    return testutil::rel_gap(analytic, numeric);
}

bool criterion_gradients() {
    int bc_ok = 0, ppo_ok = 0;
    double worst_bc = 0.0, worst_ppo = 0.0;
    for (int i = 0; i < kFdPerKind; ++i) {
        WorldSpec spec;
        spec.n_questions = 6;
        spec.seed = 2000 + i;
        const World w = gen_world(spec);
        const Index idx = build_index(w.corpus);
        const IndexRetriever retr(idx);
        const EnvConfig env;
        PolicyConfig pc;
        pc.dim = 32;
        pc.cand_hash_dim = 8;
        pc.hidden_dim = (i % 2) ? 8 : 0;  // alternate linear and one-hidden-layer

        const RewriteOracle oracle{w.oracle_map, 0.7, spec.seed};
        const auto data = build_warmup_dataset(w.questions, w.memory, retr, env, oracle, {});
        PolicyParams p = init_params(pc);
        randomize(p, 3000 + i);
        GradVec g = GradVec::zeros_like(p);
        bc_loss(p, data, w.memory, &g);
        const double gap = fd_gap(p, g, [&] { return bc_loss(p, data, w.memory, nullptr); });
        worst_bc = std::max(worst_bc, gap);
        bc_ok += gap < kFdTol;

        PolicyParams q = init_params(pc);
        randomize(q, 4000 + i, 0.3);
        CollectConfig cc;
        cc.budget_steps = 24;
        Rng rng(5000 + i);
        RolloutBatch batch = collect_rollouts(q, w.memory, retr, w.questions, env, cc, rng);
        normalize_advantages(batch);
        std::vector<const RolloutStep*> steps;
        for (const auto& s : batch.steps) steps.push_back(&s);
        randomize(q, 6000 + i, 0.35);  // move off the collection point so ratios are generic
        const PpoConfig pcfg;
        GradVec pg = GradVec::zeros_like(q);
        ppo_loss(q, steps, w.memory, pcfg, &pg);
        const double pgap = fd_gap(q, pg, [&] {
            return ppo_total_loss(ppo_loss(q, steps, w.memory, pcfg, nullptr), pcfg);
        });
        worst_ppo = std::max(worst_ppo, pgap);
        ppo_ok += pgap < kFdTol;
    }
    std::printf("  warm-up loss %d/%d (worst gap %.2e)  surrogate %d/%d (worst gap %.2e)\n",
                bc_ok, kFdPerKind, worst_bc, ppo_ok, kFdPerKind, worst_ppo);
    return bc_ok == kFdPerKind && ppo_ok == kFdPerKind;
}

// ---- criterion 4: selective retrieval ----------------------------------------------

bool criterion_when_to_retrieve() {
    std::vector<bool> idle_ok, matched_ok;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        // (a) useless corpus: learn to keep retrieval near zero at no accuracy cost
        const Run cov0 = train_on(spec_uncovered(seed), accept_train(seed));
        const EvalReport rep = greedy_eval(cov0, cov0.r.params);
        IndexRetriever retr0(cov0.idx);
        const EvalReport base = evaluate(cov0.r.params, cov0.w.questions, cov0.w.memory, retr0,
                                         EnvConfig{}, SampleMode::prob_threshold(-1.0));
        const bool a = rep.retrieval_pct <= kMaxIdleRetrPct &&
                       std::fabs(rep.em - base.em) <= kEmSlackPts;
        idle_ok.push_back(a);

        // (b) mixed world: trained F1 beats the plain warm start at matched retrieval
        const Run& mixed = mixed_filtered(seed);
        const EvalReport trained = greedy_eval(mixed, mixed.r.params);
        IndexRetriever retr(mixed.idx);
        const auto sweep = threshold_sweep(mixed_plain(seed).r.warmup_params, mixed.w.questions,
                                           mixed.w.memory, retr, EnvConfig{}, 41);
        double best_gap = 1e18;
        EvalReport matched;
        for (const auto& pt : sweep) {
            const double gap = std::fabs(pt.report.retrieval_pct - trained.retrieval_pct);
            if (gap < best_gap) {
                best_gap = gap;
                matched = pt.report;
            }
        }
        const bool b = trained.f1 > matched.f1;
        matched_ok.push_back(b);
        std::printf("  seed %llu: idle retr %.1f%% em %.1f vs %.1f %s | trained f1 %.1f@%.0f%% vs"
                    " warm start %.1f@%.0f%% %s\n",
                    (unsigned long long)seed, rep.retrieval_pct, rep.em, base.em, a ? "ok" : "MISS",
                    trained.f1, trained.retrieval_pct, matched.f1, matched.retrieval_pct,
                    b ? "ok" : "MISS");
    }
    std::printf("  idle %d/%d  matched-point %d/%d (need %d)\n", pass_count(idle_ok), kSeeds,
                pass_count(matched_ok), kSeeds, kNeedSeeds);
    return pass_count(idle_ok) >= kNeedSeeds && pass_count(matched_ok) >= kNeedSeeds;
}

// ---- criterion 5: learned rewrites recover ambiguous evidence ----------------------

bool criterion_what_to_retrieve() {
    std::vector<bool> ok;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Run& run = ambiguous_run(seed);
        IndexRetriever retr(run.idx);
        const EvalReport normal = greedy_eval(run, run.r.params);
        const EvalReport verbatim = ablation_replace_query(run.r.params, run.w.questions,
                                                           run.w.memory, retr, EnvConfig{},
                                                           SampleMode::greedy());
        const bool b = normal.hit - verbatim.hit >= kHitDropPts && verbatim.f1 < normal.f1;
        ok.push_back(b);
        std::printf("  seed %llu: hit %.1f -> %.1f  f1 %.1f -> %.1f %s\n",
                    (unsigned long long)seed, normal.hit, verbatim.hit, normal.f1, verbatim.f1,
                    b ? "ok" : "MISS");
    }
    std::printf("  %d/%d (need %d)\n", pass_count(ok), kSeeds, kNeedSeeds);
    return pass_count(ok) >= kNeedSeeds;
}

// ---- criterion 6: trained answer head is no worse than its warm start --------------

bool criterion_how_to_answer() {
    std::vector<bool> ok;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Run& run = mixed_filtered(seed);
        IndexRetriever retr(run.idx);
        const EvalReport normal = greedy_eval(run, run.r.params);
        const EvalReport spliced = ablation_replace_generator(run.r.params, run.r.warmup_params,
                                                              run.w.questions, run.w.memory, retr,
                                                              EnvConfig{}, SampleMode::greedy());
        const bool b = spliced.hit == normal.hit && spliced.f1 <= normal.f1;
        ok.push_back(b);
        std::printf("  seed %llu: hit %.1f == %.1f  f1 %.1f <= %.1f %s\n",
                    (unsigned long long)seed, spliced.hit, normal.hit, spliced.f1, normal.f1,
                    b ? "ok" : "MISS");
    }
    std::printf("  %d/%d (need %d)\n", pass_count(ok), kSeeds, kNeedSeeds);
    return pass_count(ok) >= kNeedSeeds;
}

// ---- criterion 7: retrieval ratio transfers by category ----------------------------

bool criterion_transfer() {
    std::vector<bool> ok;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Run& run = mixed_filtered(seed);
        WorldSpec held_spec;
        held_spec.n_questions = 96;
        held_spec.p_covered = 0.6;  // shifted fractions, fresh seed
        held_spec.p_known = 0.5;
        held_spec.seed = seed + 100;
        const World held = gen_world(held_spec);
        const Index hidx = build_index(held.corpus);
        const IndexRetriever hretr(hidx);

        // three-way split: answerable from memory / from the corpus / not at all
        std::map<std::string, std::string> three;
        for (const auto& [qid, cat] : held.categories)
            three[qid] = cat == "known"       ? "direct"
                         : cat == "uncovered" ? "unanswerable"
                                              : "needs_retrieval";
        const TransferReport rep = transfer_report(run.r.params, held.questions, held.memory,
                                                   three, hretr, EnvConfig{}, 0.5);
        auto retr_pct = [&](const char* cat) {
            const auto it = rep.by_category.find(cat);
            return it == rep.by_category.end() ? 0.0 : it->second.retrieval_pct;
        };
        const double rn = retr_pct("needs_retrieval");
        const double rd = retr_pct("direct");
        const double ru = retr_pct("unanswerable");
        const bool b = rn > rd && rn > ru;
        ok.push_back(b);
        std::printf("  seed %llu: needs %.1f%%  direct %.1f%%  unanswerable %.1f%% %s\n",
                    (unsigned long long)seed, rn, rd, ru, b ? "ok" : "MISS");
    }
    std::printf("  %d/%d (need %d)\n", pass_count(ok), kSeeds, kNeedSeeds);
    return pass_count(ok) >= kNeedSeeds;
}

// ---- criterion 8: filtered warm start beats plain ----------------------------------

bool criterion_warmup_style() {
    std::vector<bool> warm_ok, post_ok;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Run& filt = mixed_filtered(seed);
        const Run& plain = mixed_plain(seed);
        const double wf = greedy_eval(filt, filt.r.warmup_params).em;
        const double wp = greedy_eval(plain, plain.r.warmup_params).em;
        const double tf = greedy_eval(filt, filt.r.params).em;
        const double tp = greedy_eval(plain, plain.r.params).em;
        warm_ok.push_back(wf >= wp);
        post_ok.push_back(tf >= tp);
        std::printf("  seed %llu: warm-up em %.1f vs %.1f %s | trained em %.1f vs %.1f %s\n",
                    (unsigned long long)seed, wf, wp, wf >= wp ? "ok" : "MISS", tf, tp,
                    tf >= tp ? "ok" : "MISS");
    }
    std::printf("  warm-up %d/%d  trained %d/%d (need %d)\n", pass_count(warm_ok), kSeeds,
                pass_count(post_ok), kSeeds, kNeedSeeds);
    return pass_count(warm_ok) >= kNeedSeeds && pass_count(post_ok) >= kNeedSeeds;
}

// ---- criterion 9: deeper retrieval earns more -------------------------------------

bool criterion_retrieval_depth() {
    std::vector<bool> f1_ok, retr_ok;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
        const Run k4 = train_on(spec_deep(seed), accept_train(seed));
        auto cfg1 = accept_train(seed);
        cfg1.env.top_k = 1;
        IndexRetriever retr(k4.idx);
        const RewriteOracle oracle{k4.w.oracle_map, 0.7, seed};
        const TrainResult k1 = train_loop(k4.w.questions, k4.w.memory, retr, oracle, cfg1);

        const EvalReport rep4 = greedy_eval(k4, k4.r.params);
        EnvConfig env1;
        env1.top_k = 1;
        const EvalReport rep1 = evaluate(k1.params, k4.w.questions, k4.w.memory, retr, env1);
        f1_ok.push_back(rep4.f1 >= rep1.f1);
        retr_ok.push_back(rep4.retrieval_pct >= rep1.retrieval_pct);
        std::printf("  seed %llu: depth-4 f1 %.1f retr %.1f%% | depth-1 f1 %.1f retr %.1f%% %s %s\n",
                    (unsigned long long)seed, rep4.f1, rep4.retrieval_pct, rep1.f1,
                    rep1.retrieval_pct, rep4.f1 >= rep1.f1 ? "ok" : "MISS",
                    rep4.retrieval_pct >= rep1.retrieval_pct ? "ok" : "MISS");
    }
    std::printf("  f1 %d/%d (need %d)  retrieval volume %d/%d (need %d)\n", pass_count(f1_ok),
                kSeeds, kNeedSeeds, pass_count(retr_ok), kSeeds, kNeedSeedsRetrVolume);
    return pass_count(f1_ok) >= kNeedSeeds && pass_count(retr_ok) >= kNeedSeedsRetrVolume;
}

// ---- criterion 10: training runs are byte-identical --------------------------------

std::map<std::string, std::string> dir_contents(const std::string& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            out[fs::relative(e.path(), dir).string()] = ss.str();
        }
    return out;
}

bool criterion_determinism() {
    const std::string base = (fs::temp_directory_path() / "rdlab_accept_c10").string();
    fs::remove_all(base);
    fs::create_directories(base);

    nlohmann::json cfg = cli::default_config();
    cfg["seed"] = 7;
    cfg["world"]["n_questions"] = 24;
    cfg["train"]["iterations"] = 3;
    cfg["collect"]["budget_steps"] = 512;
    cfg["bc"]["epochs"] = 8;
    const cli::Resolved res = cli::resolve_config(cfg);

    const World w = gen_world(res.world);
    save_world(base + "/world", w, &res.world);

    // the train command prints a summary line; keep this binary's output clean
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    cli::cmd_train(res, base + "/world", base + "/run_a");
    cli::cmd_train(res, base + "/world", base + "/run_b");
    std::cout.rdbuf(old);

    const auto a = dir_contents(base + "/run_a");
    const auto b = dir_contents(base + "/run_b");
    int files = static_cast<int>(a.size());
    const bool ok = !a.empty() && a == b;
    std::printf("  %d files compared, %s\n", files, ok ? "all byte-identical" : "DIFFER");
    fs::remove_all(base);
    return ok;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool()> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "reward and metric unit values", criterion_unit_values},
        {2, "oracle plans replay exactly through the environment", criterion_oracle_replay},
        {3, "analytic gradients match finite differences", criterion_gradients},
        {4, "selective retrieval: skip a useless corpus, beat the warm start at matched retrieval",
         criterion_when_to_retrieve},
        {5, "learned rewrites recover ambiguous evidence (verbatim-query ablation)",
         criterion_what_to_retrieve},
        {6, "trained answer head is no worse than its warm start (generator ablation)",
         criterion_how_to_answer},
        {7, "retrieval ratio transfers by category to a held-out world", criterion_transfer},
        {8, "filtered warm start beats plain, before and after training",
         criterion_warmup_style},
        {9, "deeper retrieval earns more f1 and more retrieval", criterion_retrieval_depth},
        {10, "training runs are byte-identical given the seed", criterion_determinism},
    };

    bool all = true;
    for (const auto& c : criteria) {
        std::printf("criterion %d: %s\n", c.id, c.name);
        std::fflush(stdout);
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            std::printf("  exception: %s\n", e.what());
        }
        std::printf("%s %2d  %s\n", ok ? "PASS" : "FAIL", c.id, c.name);
        std::fflush(stdout);
        all &= ok;
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed" : "acceptance: FAILURES above");
    return all ? 0 : 1;
}
