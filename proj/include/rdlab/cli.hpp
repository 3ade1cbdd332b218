#pragma once

// Command line front end. One json config drives everything; the merge order
// is built-in defaults, then the SMARTRAG_LAB_SEED env var (seed only), then
// --config, then repeated --set overrides, then explicit flags. Unknown keys
// and type mismatches fail fast with the offending field named. Exit codes:
// 0 ok, 2 config problem, 3 runtime failure; errors go to stderr as one-line
// json records.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdlab/common.hpp"
#include "rdlab/env.hpp"
#include "rdlab/eval.hpp"
#include "rdlab/policy.hpp"
#include "rdlab/retriever.hpp"
#include "rdlab/train_loop.hpp"
#include "rdlab/training.hpp"
#include "rdlab/world.hpp"

namespace rdlab::cli {

/// ConfigError that remembers which config field was at fault.
struct ConfigFieldError : ConfigError {
    std::string field;
    ConfigFieldError(std::string f, const std::string& m) : ConfigError(m), field(std::move(f)) {}
};

inline void emit_error(const char* kind, const std::string& field, const std::string& message) {
    nlohmann::ordered_json rec;
    rec["error"] = kind;
    if (!field.empty()) rec["field"] = field;
    rec["message"] = message;
    std::cerr << rec.dump() << "\n";
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& field) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigFieldError(field, "expected an unsigned integer, got '" + s + "'");
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ConfigFieldError(field, "out of range: '" + s + "'");
    return v;
}

// ---- config schema ----------------------------------------------------------------

/// The full schema with default values. Every configurable knob lives here;
/// overrides are validated against this shape.
inline nlohmann::json default_config() {
    const PolicyConfig p;
    const EnvConfig e;
    const WorldSpec w;
    const WarmupConfig wu;
    const BcConfig bc;
    const CollectConfig co;
    const PpoConfig ppo;
    const TrainLoopConfig tl;
    return nlohmann::json{
        {"seed", 1},
        {"world",
         {{"n_questions", w.n_questions},
          {"p_covered", w.p_covered},
          {"p_known", w.p_known},
          {"p_ambiguous", w.p_ambiguous},
          {"p_deep", w.p_deep},
          {"distractors_per_question", w.distractors_per_question},
          {"top_k", w.top_k}}},
        {"env",
         {{"quota_n", e.quota_n}, {"top_k", e.top_k}, {"alpha", e.alpha}, {"gamma", e.gamma}}},
        {"policy",
         {{"dim", p.dim},
          {"cand_hash_dim", p.cand_hash_dim},
          {"hidden_dim", p.hidden_dim},
          {"n_templates", p.n_templates},
          {"max_candidates_per_snippet", p.max_candidates_per_snippet},
          {"ngram_max", p.ngram_max},
          {"hash_seed", p.hash_seed}}},
        {"warmup",
         {{"style", wu.style == WarmupStyle::Filtered ? "filtered" : "plain"},
          {"memory_f1_threshold", wu.memory_f1_threshold}}},
        {"bc", {{"epochs", bc.epochs}, {"minibatch", bc.minibatch}, {"lr", bc.lr}}},
        {"collect",
         {{"budget_steps", co.budget_steps},
          {"n_workers", co.n_workers},
          {"gae_lambda", co.gae_lambda},
          {"kl_beta", co.kl_beta}}},
        {"ppo",
         {{"lr", ppo.lr},
          {"clip", ppo.clip},
          {"value_coef", ppo.value_coef},
          {"entropy_coef", ppo.entropy_coef},
          {"epochs", ppo.epochs},
          {"minibatch", ppo.minibatch},
          {"normalize_advantage", ppo.normalize_advantage}}},
        {"train", {{"iterations", tl.iterations}, {"eval_every", tl.eval_every}}},
        {"oracle", {{"fidelity", 0.7}}},
        {"eval", {{"mode", "greedy"}, {"tau", 0.5}}},
        {"sweep", {{"points", 41}}},
    };
}

namespace detail {

inline const char* json_type_name(const nlohmann::json& j) {
    if (j.is_number_float()) return "number";
    if (j.is_number_integer() || j.is_number_unsigned()) return "integer";
    if (j.is_string()) return "string";
    if (j.is_boolean()) return "bool";
    if (j.is_object()) return "object";
    return "value";
}

/// Writes one override into a schema slot, keeping the slot's type. Integer
/// slots reject fractional input instead of silently truncating.
inline void assign_checked(nlohmann::json& slot, const nlohmann::json& v, const std::string& path) {
    if (slot.is_number_float()) {
        if (!v.is_number())
            throw ConfigFieldError(path, std::string("expected number, got ") + json_type_name(v));
        slot = v.get<double>();
    } else if (slot.is_number_integer() || slot.is_number_unsigned()) {
        if (!v.is_number_integer() && !v.is_number_unsigned())
            throw ConfigFieldError(path, std::string("expected integer, got ") + json_type_name(v));
        slot = v;
    } else if (slot.is_string()) {
        if (!v.is_string())
            throw ConfigFieldError(path, std::string("expected string, got ") + json_type_name(v));
        slot = v;
    } else if (slot.is_boolean()) {
        if (!v.is_boolean())
            throw ConfigFieldError(path, std::string("expected bool, got ") + json_type_name(v));
        slot = v;
    } else {
        throw ConfigFieldError(path, "not an overridable value");
    }
}

}  // namespace detail

/// Deep-merges an override object into the schema. Every key must already
/// exist in `base` with a matching shape.
inline void overlay_config(nlohmann::json& base, const nlohmann::json& add,
                           const std::string& prefix = "") {
    for (auto it = add.begin(); it != add.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key())) throw ConfigFieldError(path, "unknown config key");
        nlohmann::json& slot = base[it.key()];
        if (slot.is_object()) {
            if (!it->is_object()) throw ConfigFieldError(path, "expected a config section");
            overlay_config(slot, *it, path);
        } else {
            detail::assign_checked(slot, *it, path);
        }
    }
}

/// Applies one "dotted.path=value" override. The value parses as json when it
/// can (numbers, bools) and falls back to a plain string.
inline void apply_set(nlohmann::json& base, const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigFieldError(kv, "--set expects key=value");
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded() || value.is_object() || value.is_array() || value.is_null())
        value = raw;

    nlohmann::json* node = &base;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (!node->is_object() || !node->contains(part))
            throw ConfigFieldError(key, "unknown config key");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object()) throw ConfigFieldError(key, "refers to a section, not a value");
    detail::assign_checked(*node, value, key);
}

// ---- resolved configuration -------------------------------------------------------

struct Resolved {
    nlohmann::json raw;  // the merged json, written into run dirs verbatim
    std::uint64_t seed = 1;
    WorldSpec world;
    EnvConfig env;
    TrainLoopConfig train;  // carries policy/warmup/bc/collect/ppo along
    double oracle_fidelity = 0.7;
    std::string eval_mode = "greedy";
    double tau = 0.5;
    int sweep_points = 41;
};

inline Resolved resolve_config(const nlohmann::json& j) {
    Resolved r;
    r.raw = j;
    if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0)
        throw ConfigFieldError("seed", "must be non-negative");
    r.seed = j.at("seed").get<std::uint64_t>();

    const auto& w = j.at("world");
    r.world.n_questions = w.at("n_questions").get<int>();
    r.world.p_covered = w.at("p_covered").get<double>();
    r.world.p_known = w.at("p_known").get<double>();
    r.world.p_ambiguous = w.at("p_ambiguous").get<double>();
    r.world.p_deep = w.at("p_deep").get<double>();
    r.world.distractors_per_question = w.at("distractors_per_question").get<int>();
    r.world.top_k = w.at("top_k").get<int>();
    r.world.seed = r.seed;

    const auto& e = j.at("env");
    r.env.quota_n = e.at("quota_n").get<int>();
    r.env.top_k = e.at("top_k").get<int>();
    r.env.alpha = e.at("alpha").get<double>();
    r.env.gamma = e.at("gamma").get<double>();

    const auto& p = j.at("policy");
    PolicyConfig& pc = r.train.policy;
    pc.dim = p.at("dim").get<int>();
    pc.cand_hash_dim = p.at("cand_hash_dim").get<int>();
    pc.hidden_dim = p.at("hidden_dim").get<int>();
    pc.n_templates = p.at("n_templates").get<int>();
    pc.max_candidates_per_snippet = p.at("max_candidates_per_snippet").get<int>();
    pc.ngram_max = p.at("ngram_max").get<int>();
    pc.hash_seed = p.at("hash_seed").get<std::uint64_t>();

    const std::string style = j.at("warmup").at("style").get<std::string>();
    if (style == "filtered")
        r.train.warmup.style = WarmupStyle::Filtered;
    else if (style == "plain")
        r.train.warmup.style = WarmupStyle::Plain;
    else
        throw ConfigFieldError("warmup.style", "must be 'filtered' or 'plain', got '" + style + "'");
    r.train.warmup.memory_f1_threshold = j.at("warmup").at("memory_f1_threshold").get<double>();

    const auto& bc = j.at("bc");
    r.train.bc.epochs = bc.at("epochs").get<int>();
    r.train.bc.minibatch = bc.at("minibatch").get<int>();
    r.train.bc.lr = bc.at("lr").get<double>();

    const auto& co = j.at("collect");
    r.train.collect.budget_steps = co.at("budget_steps").get<int>();
    r.train.collect.n_workers = co.at("n_workers").get<int>();
    r.train.collect.gae_lambda = co.at("gae_lambda").get<double>();
    r.train.collect.kl_beta = co.at("kl_beta").get<double>();

    const auto& ppo = j.at("ppo");
    r.train.ppo.lr = ppo.at("lr").get<double>();
    r.train.ppo.clip = ppo.at("clip").get<double>();
    r.train.ppo.value_coef = ppo.at("value_coef").get<double>();
    r.train.ppo.entropy_coef = ppo.at("entropy_coef").get<double>();
    r.train.ppo.epochs = ppo.at("epochs").get<int>();
    r.train.ppo.minibatch = ppo.at("minibatch").get<int>();
    r.train.ppo.normalize_advantage = ppo.at("normalize_advantage").get<bool>();

    r.train.env = r.env;
    r.train.iterations = j.at("train").at("iterations").get<int>();
    r.train.eval_every = j.at("train").at("eval_every").get<int>();
    r.train.seed = r.seed;

    r.oracle_fidelity = j.at("oracle").at("fidelity").get<double>();
    r.eval_mode = j.at("eval").at("mode").get<std::string>();
    if (r.eval_mode != "greedy" && r.eval_mode != "sample" && r.eval_mode != "threshold" &&
        r.eval_mode != "prob_threshold")
        throw ConfigFieldError("eval.mode", "must be one of greedy, sample, threshold, "
                                            "prob_threshold; got '" + r.eval_mode + "'");
    r.tau = j.at("eval").at("tau").get<double>();
    r.sweep_points = j.at("sweep").at("points").get<int>();
    return r;
}

inline SampleMode decode_mode(const Resolved& r) {
    if (r.eval_mode == "sample") return SampleMode::sample();
    if (r.eval_mode == "threshold") return SampleMode::threshold(r.tau);
    if (r.eval_mode == "prob_threshold") return SampleMode::prob_threshold(r.tau);
    return SampleMode::greedy();
}

/// Flags shared by every subcommand.
struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed_opt;  // parsed lazily so bad input names the field
    int workers = -1;
};

inline Resolved gather_config(const CommonArgs& a) {
    nlohmann::json cfg = default_config();
    if (const char* env = std::getenv("SMARTRAG_LAB_SEED"))
        cfg["seed"] = parse_u64(env, "SMARTRAG_LAB_SEED");
    if (!a.config_path.empty()) {
        std::ifstream in(a.config_path);
        if (!in) throw IoError("cannot open config file: " + a.config_path);
        nlohmann::json file = nlohmann::json::parse(in, nullptr, false);
        if (file.is_discarded())
            throw ConfigFieldError("--config", a.config_path + " is not valid json");
        if (!file.is_object())
            throw ConfigFieldError("--config", a.config_path + " must hold a json object");
        overlay_config(cfg, file);
    }
    for (const auto& kv : a.sets) apply_set(cfg, kv);
    if (!a.seed_opt.empty()) cfg["seed"] = parse_u64(a.seed_opt, "seed");
    if (a.workers >= 0) cfg["collect"]["n_workers"] = a.workers;
    return resolve_config(cfg);
}

// ---- shared plumbing ---------------------------------------------------------------

struct OpenedWorld {
    World world;
    Index idx;
};

inline OpenedWorld open_world(const std::string& dir) {
    OpenedWorld b;
    b.world = load_world(dir);
    b.idx = build_index(b.world.corpus);
    return b;
}

/// Run dirs hold the resolved config and a manifest. Deliberately no
/// timestamps or host info: identical configs must produce identical bytes.
inline void write_run_dir(const std::string& dir, const std::string& command, const Resolved& r,
                          const std::vector<std::pair<std::string, std::string>>& inputs) {
    std::filesystem::create_directories(dir);
    std::ofstream cfg(dir + "/config.json");
    cfg << r.raw.dump(2) << "\n";

    nlohmann::ordered_json m;
    m["format"] = "rdlab-run-v1";
    m["command"] = command;
    m["seed"] = r.seed;
    for (const auto& [k, v] : inputs) m[k] = v;
    std::ofstream out(dir + "/manifest.json");
    out << m.dump(2) << "\n";
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

// ---- subcommands -------------------------------------------------------------------

inline int cmd_gen_world(const Resolved& r, const std::string& out_dir) {
    const World w = gen_world(r.world);
    save_world(out_dir, w, &r.world);

    std::map<std::string, int> by_cat;
    for (const auto& [qid, cat] : w.categories) ++by_cat[cat];
    nlohmann::ordered_json rec;
    rec["command"] = "gen-world";
    rec["dir"] = out_dir;
    rec["questions"] = w.questions.size();
    rec["documents"] = w.corpus.size();
    rec["categories"] = by_cat;
    std::cout << rec.dump() << "\n";
    return 0;
}

inline int cmd_warmup(const Resolved& r, const std::string& world_dir, const std::string& out_dir) {
    const OpenedWorld b = open_world(world_dir);
    const IndexRetriever retr(b.idx);
    const RewriteOracle oracle{b.world.oracle_map, r.oracle_fidelity, r.seed};

    const auto data = build_warmup_dataset(b.world.questions, b.world.memory, retr, r.env, oracle,
                                           r.train.warmup);
    PolicyParams params = init_params(r.train.policy);
    BcConfig bc = r.train.bc;
    bc.seed = sub_seed(r.seed, "bc");  // same stream the full train loop uses
    const BcStats stats = behavior_clone(params, data, b.world.memory, bc);

    write_run_dir(out_dir, "warmup", r, {{"world", world_dir}});
    save_checkpoint(out_dir + "/warmup.json", params);

    nlohmann::ordered_json rec;
    rec["command"] = "warmup";
    rec["examples"] = data.size();
    rec["skipped_answer_terms"] = stats.skipped_answer_terms;
    rec["final_nll"] = stats.epoch_nll.empty() ? 0.0 : stats.epoch_nll.back();
    rec["checkpoint"] = out_dir + "/warmup.json";
    std::cout << rec.dump() << "\n";
    return 0;
}

inline int cmd_train(const Resolved& r, const std::string& world_dir, const std::string& out_dir) {
    const OpenedWorld b = open_world(world_dir);
    const IndexRetriever retr(b.idx);
    const RewriteOracle oracle{b.world.oracle_map, r.oracle_fidelity, r.seed};

    write_run_dir(out_dir, "train", r, {{"world", world_dir}});
    std::filesystem::create_directories(out_dir + "/checkpoints");

    const TrainResult res = train_loop(
        b.world.questions, b.world.memory, retr, oracle, r.train,
        [&](const IterationStats& s, const PolicyParams& p) {
            char name[32];
            std::snprintf(name, sizeof name, "iter_%04d.json", s.iter);
            save_checkpoint(out_dir + "/checkpoints/" + name, p);
        });

    save_checkpoint(out_dir + "/warmup.json", res.warmup_params);
    save_checkpoint(out_dir + "/final.json", res.params);
    write_metrics_csv(out_dir + "/metrics.csv", res.iterations);

    nlohmann::ordered_json rec;
    rec["command"] = "train";
    rec["dir"] = out_dir;
    rec["iterations"] = res.iterations.size();
    if (!res.iterations.empty())
        rec["mean_return"] = res.iterations.back().mean_return;
    for (auto it = res.iterations.rbegin(); it != res.iterations.rend(); ++it) {
        if (it->evaluated) {
            rec["eval"] = report_to_json(it->eval);
            break;
        }
    }
    std::cout << rec.dump() << "\n";
    return 0;
}

inline int cmd_eval(const Resolved& r, const std::string& world_dir,
                    const std::string& params_path, const std::string& out_path) {
    const OpenedWorld b = open_world(world_dir);
    const IndexRetriever retr(b.idx);
    const PolicyParams params = load_checkpoint(params_path);

    const EvalReport rep = evaluate(params, b.world.questions, b.world.memory, retr, r.env,
                                    decode_mode(r), r.seed);
    const nlohmann::json body = report_to_json(rep);
    if (!out_path.empty()) write_json_file(out_path, body);
    std::cout << body.dump() << "\n";
    return 0;
}

inline int cmd_sweep(const Resolved& r, const std::string& world_dir,
                     const std::string& params_path, const std::string& out_csv) {
    const OpenedWorld b = open_world(world_dir);
    const IndexRetriever retr(b.idx);
    const PolicyParams params = load_checkpoint(params_path);

    const auto points = threshold_sweep(params, b.world.questions, b.world.memory, retr, r.env,
                                        r.sweep_points);
    write_sweep_csv(out_csv, points);

    nlohmann::ordered_json rec;
    rec["command"] = "sweep";
    rec["points"] = points.size();
    rec["csv"] = out_csv;
    if (!points.empty()) {
        rec["retrieval_pct_min"] = points.front().report.retrieval_pct;
        rec["retrieval_pct_max"] = points.back().report.retrieval_pct;
    }
    std::cout << rec.dump() << "\n";
    return 0;
}

inline int cmd_transfer(const Resolved& r, const std::string& world_dir,
                        const std::string& params_path, const std::string& out_path) {
    const OpenedWorld b = open_world(world_dir);
    const IndexRetriever retr(b.idx);
    const PolicyParams params = load_checkpoint(params_path);

    const TransferReport rep = transfer_report(params, b.world.questions, b.world.memory,
                                               b.world.categories, retr, r.env, r.tau);
    const nlohmann::json body = transfer_to_json(rep);
    if (!out_path.empty()) write_json_file(out_path, body);
    std::cout << body.dump() << "\n";
    return 0;
}

/// Self-check: the stored best-rewrite labels must match a fresh computation,
/// and every brute-force plan must replay to exactly its claimed value.
inline int cmd_oracle_check(const Resolved& r, const std::string& world_dir) {
    const OpenedWorld b = open_world(world_dir);
    const IndexRetriever retr(b.idx);

    const auto recomputed = compute_oracle_map(b.world.questions, b.idx);
    int map_mismatches = 0;
    for (const auto& [qid, t] : b.world.oracle_map) {
        const auto it = recomputed.find(qid);
        if (it == recomputed.end() || it->second != t) ++map_mismatches;
    }

    const OracleResult bf = brute_force_all(b.world.questions, b.world.memory, r.train.policy,
                                            retr, r.env);
    int replay_mismatches = 0;
    for (std::size_t i = 0; i < b.world.questions.size(); ++i) {
        const double replayed = replay_plan_value(bf.plans[i], b.world.questions[i], retr, r.env);
        if (replayed != bf.plans[i].value) ++replay_mismatches;
    }

    nlohmann::ordered_json rec;
    rec["command"] = "oracle-check";
    rec["questions"] = b.world.questions.size();
    rec["oracle_map_compared"] = b.world.oracle_map.size();
    rec["oracle_map_mismatches"] = map_mismatches;
    rec["replay_mismatches"] = replay_mismatches;
    rec["mean_plan_value"] = bf.mean_value;
    std::cout << rec.dump() << "\n";

    if (map_mismatches != 0 || replay_mismatches != 0) {
        emit_error("runtime", "", "oracle self-check failed");
        return 3;
    }
    return 0;
}

// ---- entry point -------------------------------------------------------------------

inline int run(int argc, char** argv) {
    CLI::App app{"retrieval decision lab"};
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&args](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "json config file merged over defaults");
        sub->add_option("--set", args.sets, "dotted.path=value override, repeatable")
            ->allow_extra_args(false);
        sub->add_option("--seed", args.seed_opt, "run seed, wins over config and env");
        sub->add_option("--workers", args.workers, "rollout workers, wins over config");
    };

    std::string out_dir, world_dir, params_path, out_path;
    int rc = 0;

    CLI::App* gen = app.add_subcommand("gen-world", "generate and save a synthetic world");
    add_common(gen);
    gen->add_option("--out", out_dir, "bundle directory to create")->required();
    gen->callback([&] { rc = cmd_gen_world(gather_config(args), out_dir); });

    CLI::App* warm = app.add_subcommand("warmup", "behavior-clone a fresh policy from a teacher");
    add_common(warm);
    warm->add_option("--world", world_dir, "world bundle directory")->required();
    warm->add_option("--out", out_dir, "run directory to create")->required();
    warm->callback([&] { rc = cmd_warmup(gather_config(args), world_dir, out_dir); });

    CLI::App* train = app.add_subcommand("train", "warm up, then run clipped policy iterations");
    add_common(train);
    train->add_option("--world", world_dir, "world bundle directory")->required();
    train->add_option("--out", out_dir, "run directory to create")->required();
    train->callback([&] { rc = cmd_train(gather_config(args), world_dir, out_dir); });

    CLI::App* ev = app.add_subcommand("eval", "score a checkpoint on a world");
    add_common(ev);
    ev->add_option("--world", world_dir, "world bundle directory")->required();
    ev->add_option("--params", params_path, "policy checkpoint to load")->required();
    ev->add_option("--out", out_path, "also write the report here");
    ev->callback([&] { rc = cmd_eval(gather_config(args), world_dir, params_path, out_path); });

    CLI::App* sw = app.add_subcommand("sweep", "trace the answer/retrieve threshold curve");
    add_common(sw);
    sw->add_option("--world", world_dir, "world bundle directory")->required();
    sw->add_option("--params", params_path, "policy checkpoint to load")->required();
    sw->add_option("--out", out_path, "csv file to write")->required();
    sw->callback([&] { rc = cmd_sweep(gather_config(args), world_dir, params_path, out_path); });

    CLI::App* tr = app.add_subcommand("transfer", "per-category report on a (new) world");
    add_common(tr);
    tr->add_option("--world", world_dir, "world bundle directory")->required();
    tr->add_option("--params", params_path, "policy checkpoint to load")->required();
    tr->add_option("--out", out_path, "also write the report here");
    tr->callback([&] { rc = cmd_transfer(gather_config(args), world_dir, params_path, out_path); });

    CLI::App* oc = app.add_subcommand("oracle-check", "verify stored labels and plan values");
    add_common(oc);
    oc->add_option("--world", world_dir, "world bundle directory")->required();
    oc->callback([&] { rc = cmd_oracle_check(gather_config(args), world_dir); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error("config", e.get_name(), e.what());
        return 2;
    } catch (const ConfigFieldError& e) {
        emit_error("config", e.field, e.what());
        return 2;
    } catch (const ConfigError& e) {
        emit_error("config", "", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("runtime", "", e.what());
        return 3;
    }
    return rc;
}

}  // namespace rdlab::cli
