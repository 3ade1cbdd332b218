#pragma once

// Synthetic world generation. A world is a set of templated questions, an
// in-memory corpus engineered so retrieval difficulty is controlled and
// verified (not just sampled), a parametric memory of claimed answers, a
// per-question oracle rewrite map, and category labels used by the transfer
// report. Generation is deterministic in the generation seed.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/common.hpp"
#include "rdlab/metrics.hpp"
#include "rdlab/policy.hpp"
#include "rdlab/retriever.hpp"

namespace rdlab {

struct WorldSpec {
    int n_questions = 120;
    double p_covered = 0.85;    // corpus contains the gold answer
    double p_known = 0.4;       // memory entry agrees with the gold
    double p_ambiguous = 0.25;  // of covered: verbatim query fails, type hint works
    double p_deep = 0.25;       // of covered non-ambiguous: gold parked at rank 2..top_k
    int distractors_per_question = 6;
    int top_k = 4;  // retrieval depth the ambiguity/depth guarantees are verified at
    std::uint64_t seed = 1;
};

struct World {
    std::vector<Question> questions;
    std::vector<Document> corpus;
    Memory memory;
    std::map<std::string, int> oracle_map;          // question id -> template index
    std::map<std::string, std::string> categories;  // question id -> label
};

namespace worldgen {

// Token vocabularies are prefix-partitioned by role (entity syllables start
// with consonant clusters, person-name syllables with consonant+vowel,
// filler with vowels) so answer strings can never appear by accident inside
// filler or foreign entities.
inline const std::array<const char*, 10>& entity_syllables() {
    static const std::array<const char*, 10> s = {"bra", "dro", "kru", "tra", "vre",
                                                  "zor", "gla", "pri", "sto", "cle"};
    return s;
}
inline const std::array<const char*, 10>& name_syllables() {
    static const std::array<const char*, 10> s = {"da", "mi", "ro", "ve", "lu",
                                                  "ta", "ni", "so", "pe", "ka"};
    return s;
}
inline const std::array<const char*, 10>& filler_syllables() {
    static const std::array<const char*, 10> s = {"al", "en", "ir", "om", "ub",
                                                  "ex", "ov", "iq", "ud", "ac"};
    return s;
}
inline const std::array<const char*, 5>& place_suffixes() {
    static const std::array<const char*, 5> s = {"burg", "ville", "ton", "holm", "stad"};
    return s;
}

inline const std::array<const char*, 3>& wh_kinds() {
    static const std::array<const char*, 3> s = {"who", "when", "where"};
    return s;
}
inline const std::array<std::array<const char*, 6>, 3>& relations() {
    static const std::array<std::array<const char*, 6>, 3> r = {{
        {"producer", "director", "founder", "architect", "composer", "captain"},
        {"released", "founded", "constructed", "launched", "discovered", "premiered"},
        {"built", "assembled", "filmed", "signed", "stored", "anchored"},
    }};
    return r;
}

inline std::string compose(const std::array<const char*, 10>& syl, Rng& rng, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += syl[rng.uniform_int(syl.size())];
    return out;
}

inline std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

inline std::string filler_words(Rng& rng, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out.push_back(' ');
        out += compose(filler_syllables(), rng, 3);
    }
    return out;
}

/// Internal per-question plan; docs are rebuilt from `doc_seed` plus the
/// escalation counters, so verification retries are deterministic.
struct Plan {
    std::string id, wh, relation, entity, gold, memory_answer;
    int relation_idx = 0;
    bool covered = false, known = false, ambiguous = false, deep = false;
    std::vector<std::string> wrong;  // same-type wrong answers for distractor spans
    std::uint64_t doc_seed = 0;
    int amb_boost = 0;    // extra verbatim-only tokens in ambiguity distractors
    int type_boost = 0;   // extra type-token repeats in the ambiguous gold doc
    int gold_boost = 0;   // extra entity+relation repeats in a plain gold doc
    int gold_pad = 0;     // extra filler in a depth-diluted gold doc
    int shadow_pad = 0;   // extra filler in shadow docs (weakens them)
};

inline std::string question_text(const Plan& p) {
    if (p.wh == "who") return "Who was the " + p.relation + " of " + p.entity + "?";
    if (p.wh == "when") return "When was " + p.entity + " " + p.relation + "?";
    return "Where was " + p.entity + " " + p.relation + "?";
}

inline std::string type_token(const std::string& wh) {
    if (wh == "who") return "person";
    if (wh == "when") return "date";
    return "place";
}

inline std::string make_gold(const std::string& wh, Rng& rng, std::set<std::string>& used) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::string g;
        if (wh == "who") {
            g = compose(name_syllables(), rng, 2) + " " + compose(name_syllables(), rng, 2);
        } else if (wh == "when") {
            g = std::to_string(1200 + static_cast<int>(rng.uniform_int(850)));
        } else {
            g = compose(name_syllables(), rng, 2) +
                place_suffixes()[rng.uniform_int(place_suffixes().size())];
        }
        if (used.insert(g).second) return g;
    }
    throw GenerationError("could not draw a unique gold answer for type " + wh);
}

inline std::string repeat_words(const std::string& w, int times) {
    std::string out;
    for (int i = 0; i < times; ++i) {
        if (i) out.push_back(' ');
        out += w;
    }
    return out;
}

/// All documents a single question contributes, derived deterministically
/// from the plan. Distractor answer spans always carry wrong answers, so a
/// document is gold-bearing iff it is the question's gold document.
inline std::vector<Document> docs_for(const Plan& p, const WorldSpec& spec) {
    Rng rng(p.doc_seed);
    std::vector<Document> docs;
    const std::string type = type_token(p.wh);
    const std::string ent_lower = lower_copy(p.entity);
    auto wrong_at = [&](std::size_t i) { return p.wrong[i % p.wrong.size()]; };

    if (p.covered && p.ambiguous) {
        // The gold document omits every verbatim-only question token; the
        // distractors carry them with escalating repetition. Only the gold
        // document carries the type token, which is what the hinted rewrite
        // adds, so the hint flips the ranking.
        Document gold;
        gold.id = p.id + "_gold";
        gold.title = type + " record";
        gold.text = p.entity + " " + p.relation + " " + repeat_words(type, 1 + p.type_boost) +
                    " " + p.gold + " " + filler_words(rng, 2 + static_cast<int>(rng.uniform_int(3)));
        gold.answer_span = p.gold;
        docs.push_back(std::move(gold));

        const int n_amb = std::max(spec.top_k + 1, 5);
        for (int i = 0; i < n_amb; ++i) {
            Document d;
            d.id = p.id + "_amb" + std::to_string(i);
            // the title must not repeat entity or relation: equal term
            // frequency on the shared terms is what lets the type token
            // decide the hinted ranking
            d.title = "survey record";
            d.text = repeat_words(p.wh + " was of", 1 + p.amb_boost) + " " + p.entity + " " +
                     p.relation + " " + wrong_at(i) + " " +
                     filler_words(rng, static_cast<int>(rng.uniform_int(2)));
            d.answer_span = wrong_at(i);
            docs.push_back(std::move(d));
        }
        const int n_plain = std::max(0, spec.distractors_per_question - n_amb);
        for (int i = 0; i < n_plain; ++i) {
            Document d;
            d.id = p.id + "_x" + std::to_string(i);
            d.title = "field notes";
            d.text = ent_lower + " " + wrong_at(n_amb + i) + " " +
                     filler_words(rng, 8 + static_cast<int>(rng.uniform_int(6)));
            d.answer_span = wrong_at(n_amb + i);
            docs.push_back(std::move(d));
        }
        return docs;
    }

    if (p.covered) {
        Document gold;
        gold.id = p.id + "_gold";
        if (p.deep) {
            // Shadow documents mirror the gold's term multiset (including the
            // type token) but are strictly shorter, so they outrank it under
            // every rewrite; plain distractors are strictly longer and stay
            // below it. The length hierarchy is deterministic: gold never
            // surfaces at rank 1, and the best rewrite keeps it within top_k.
            // A depth-1 retriever misses it; depth top_k sees it.
            gold.title = p.entity + " record";
            gold.text = p.entity + " was the " + p.relation + " of " + type + " " + p.gold + " " +
                        filler_words(rng, 7 + 2 * p.gold_pad);
            gold.answer_span = p.gold;
            docs.push_back(std::move(gold));

            const int n_shadow = std::min(3, std::max(1, spec.top_k - 1));
            for (int i = 0; i < n_shadow; ++i) {
                Document d;
                d.id = p.id + "_sh" + std::to_string(i);
                d.title = p.entity + " " + p.relation + " record";
                d.text = p.entity + " was the " + p.relation + " of " + type + " " + wrong_at(i) +
                         " " + filler_words(rng, 1 + p.shadow_pad);
                d.answer_span = wrong_at(i);
                docs.push_back(std::move(d));
            }
            const int n_plain = std::max(0, spec.distractors_per_question - n_shadow);
            for (int i = 0; i < n_plain; ++i) {
                Document d;
                d.id = p.id + "_x" + std::to_string(i);
                d.title = "field notes";
                d.text = ent_lower + " " + wrong_at(3 + i) + " " +
                         filler_words(rng, 14 + static_cast<int>(rng.uniform_int(6)));
                d.answer_span = wrong_at(3 + i);
                docs.push_back(std::move(d));
            }
            return docs;
        }

        gold.title = p.entity + " " + p.relation;
        gold.text = repeat_words(p.entity + " was the " + p.relation + " of", 1 + p.gold_boost) +
                    " " + type + " " + p.gold + " " +
                    filler_words(rng, 4 + static_cast<int>(rng.uniform_int(5)));
        gold.answer_span = p.gold;
        docs.push_back(std::move(gold));

        for (int i = 0; i < spec.distractors_per_question; ++i) {
            Document d;
            d.id = p.id + "_x" + std::to_string(i);
            d.title = "field notes";
            d.text = ent_lower + " " + wrong_at(i) + " " +
                     filler_words(rng, 8 + static_cast<int>(rng.uniform_int(6)));
            d.answer_span = wrong_at(i);
            docs.push_back(std::move(d));
        }
        return docs;
    }

    // uncovered: plausible lookalikes only, every span wrong
    for (int i = 0; i < std::max(2, spec.distractors_per_question / 2); ++i) {
        Document d;
        d.id = p.id + "_lk" + std::to_string(i);
        d.title = p.entity + " " + p.relation + " record";
        d.text = p.wh + " was of " + p.entity + " " + p.relation + " " + wrong_at(i) + " " +
                 filler_words(rng, 1 + static_cast<int>(rng.uniform_int(3)));
        d.answer_span = wrong_at(i);
        docs.push_back(std::move(d));
    }
    for (int i = 0; i < spec.distractors_per_question / 2; ++i) {
        Document d;
        d.id = p.id + "_x" + std::to_string(i);
        d.title = "field notes";
        d.text = ent_lower + " " + wrong_at(7 + i) + " " +
                 filler_words(rng, 8 + static_cast<int>(rng.uniform_int(6)));
        d.answer_span = wrong_at(7 + i);
        docs.push_back(std::move(d));
    }
    return docs;
}

inline bool gold_bearing(const Snippet& sn, const std::vector<std::string>& golds) {
    if (sn.answer_span && exact_match(*sn.answer_span, golds) > 0.5) return true;
    return hit(sn.text, golds);
}

/// Rank (1-based) of the first gold-bearing document under the given query,
/// or INT_MAX when none scores above zero.
inline int gold_rank(const Index& idx, const std::string& query,
                     const std::vector<std::string>& golds) {
    const auto ranking = search(idx, query, static_cast<int>(idx.size())).snippets;
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (gold_bearing(ranking[i], golds)) return static_cast<int>(i) + 1;
    return std::numeric_limits<int>::max();
}

/// Rank-based selection: mark the `count` highest-scoring eligible indices.
inline std::vector<bool> select_top(const std::vector<double>& scores,
                                    const std::vector<bool>& eligible, int count) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (eligible[i]) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<bool> out(scores.size(), false);
    for (int i = 0; i < count && i < static_cast<int>(order.size()); ++i) out[order[i]] = true;
    return out;
}

}  // namespace worldgen

/// Per-question best rewrite: lowest gold rank across templates, ties to the
/// lower template index; uncovered questions default to the keyword rewrite.
inline std::map<std::string, int> compute_oracle_map(const std::vector<Question>& questions,
                                                     const Index& idx) {
    std::map<std::string, int> out;
    for (const auto& q : questions) {
        int best_t = static_cast<int>(RewriteTemplate::KeywordsOnly);
        int best_rank = std::numeric_limits<int>::max();
        for (int t = 0; t < 4; ++t) {
            const std::string query = apply_template(static_cast<RewriteTemplate>(t), q.text);
            const int r = worldgen::gold_rank(idx, query, q.gold_answers);
            if (r < best_rank) {
                best_rank = r;
                best_t = t;
            }
        }
        out[q.id] = best_t;
    }
    return out;
}

/// Disjoint labels, in priority order:
///   known      - the memory entry already matches the gold (token F1 >= 0.2)
///   covered    - a verbatim query surfaces a gold-bearing document in top K
///   ambiguous  - only a rewritten query surfaces one
///   uncovered  - no rewrite surfaces one
inline std::map<std::string, std::string> compute_categories(
    const std::vector<Question>& questions, const Memory& memory, const Index& idx, int top_k) {
    std::map<std::string, std::string> out;
    for (const auto& q : questions) {
        const std::string mem = memory.count(q.id) ? memory.at(q.id) : "";
        double f1 = 0.0;
        for (const auto& g : q.gold_answers) f1 = std::max(f1, token_f1(mem, {g}));
        if (f1 >= 0.2) {
            out[q.id] = "known";
            continue;
        }
        const int id_rank = worldgen::gold_rank(
            idx, apply_template(RewriteTemplate::Identity, q.text), q.gold_answers);
        if (id_rank <= top_k) {
            out[q.id] = "covered";
            continue;
        }
        bool rewritten = false;
        for (int t = 1; t < 4 && !rewritten; ++t) {
            const int r = worldgen::gold_rank(idx, apply_template(static_cast<RewriteTemplate>(t), q.text),
                                              q.gold_answers);
            rewritten = r <= top_k;
        }
        out[q.id] = rewritten ? "ambiguous" : "uncovered";
    }
    return out;
}

/// Noisy teacher: suggests the per-question best rewrite with probability
/// `fidelity`, otherwise a deterministic wrong one. The choice is a pure
/// function of the question id, stable across calls.
struct RewriteOracle {
    std::map<std::string, int> oracle_map;
    double fidelity = 0.7;
    std::uint64_t seed = 0;

    RewriteTemplate operator()(const Question& q) const {
        const auto it = oracle_map.find(q.id);
        const int best =
            it != oracle_map.end() ? it->second : static_cast<int>(RewriteTemplate::KeywordsOnly);
        const std::uint64_t h = splitmix64(fnv1a64(q.id, seed ^ 0x6f7261636cULL));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        if (u < fidelity) return static_cast<RewriteTemplate>(best);
        int k = static_cast<int>(splitmix64(h) % 3);  // one of the three others
        if (k >= best) ++k;
        return static_cast<RewriteTemplate>(k);
    }
};

/// Builds a world and verifies its engineered retrieval properties by
/// construction search, regenerating offending document sets (bounded) until
/// every guarantee holds:
///   plain covered   -> gold rank 1 on the verbatim query
///   ambiguous       -> gold outside top K verbatim, rank 1 with the type hint
///   depth-diluted   -> gold never rank 1, within top_k on the best rewrite
inline World gen_world(const WorldSpec& spec) {
    if (spec.n_questions <= 0) throw ConfigError("world needs at least one question");
    using namespace worldgen;

    Rng rng(sub_seed(spec.seed, "worldgen"));
    const int n = spec.n_questions;

    // -- plan questions ---------------------------------------------------
    std::vector<Plan> plans(n);
    std::set<std::string> used_answers, used_entity_words;
    for (int i = 0; i < n; ++i) {
        Plan& p = plans[i];
        char idbuf[16];
        std::snprintf(idbuf, sizeof idbuf, "q%04d", i);
        p.id = idbuf;
        const int wh_i = i % 3;
        p.wh = wh_kinds()[wh_i];
        p.relation_idx = static_cast<int>(rng.uniform_int(relations()[wh_i].size()));
        p.relation = relations()[wh_i][p.relation_idx];
        for (int attempt = 0;; ++attempt) {
            // 2-3 syllables per word keeps the pool comfortably larger than
            // the two words consumed per question
            const std::string a =
                capitalize(compose(entity_syllables(), rng, 2 + static_cast<int>(rng.uniform_int(2))));
            const std::string b =
                capitalize(compose(entity_syllables(), rng, 2 + static_cast<int>(rng.uniform_int(2))));
            if (used_entity_words.count(a) || used_entity_words.count(b) || a == b) {
                if (attempt > 1000) throw GenerationError("entity space exhausted");
                continue;
            }
            used_entity_words.insert(a);
            used_entity_words.insert(b);
            p.entity = a + " " + b;
            break;
        }
        p.gold = make_gold(p.wh, rng, used_answers);
        p.doc_seed = sub_seed(spec.seed, "docs:" + p.id);
    }

    // -- affinity-correlated condition assignment --------------------------
    // Relation identity carries a stable prior over coverage and knownness
    // (plus noise), so the same surface vocabulary predicts the same best
    // behavior in any world drawn from any seed. Knownness follows a phase
    // shifted relation pattern rather than the mirror of coverage, otherwise
    // unknown-and-uncovered questions would never co-occur.
    std::vector<double> cover_score(n), known_score(n), amb_score(n), deep_score(n);
    for (int i = 0; i < n; ++i) {
        const double t = plans[i].relation_idx / 5.0;  // 0..1 across the relation list
        const double kt = ((plans[i].relation_idx + 2) % 6) / 5.0;
        cover_score[i] = 0.2 + 0.6 * t + 0.35 * rng.uniform();
        known_score[i] = 0.8 - 0.6 * kt + 0.35 * rng.uniform();
        amb_score[i] = 0.3 + 0.5 * (1.0 - std::fabs(2.0 * t - 1.0)) + 0.35 * rng.uniform();
        deep_score[i] = rng.uniform();
    }
    const std::vector<bool> all(n, true);
    auto covered = select_top(cover_score, all, static_cast<int>(spec.p_covered * n + 0.5));
    auto known = select_top(known_score, all, static_cast<int>(spec.p_known * n + 0.5));
    int n_cov = 0;
    for (int i = 0; i < n; ++i) n_cov += covered[i] ? 1 : 0;
    auto ambiguous = select_top(amb_score, covered, static_cast<int>(spec.p_ambiguous * n_cov + 0.5));
    std::vector<bool> deep_eligible(n, false);
    int n_plain_cov = 0;
    for (int i = 0; i < n; ++i) {
        deep_eligible[i] = covered[i] && !ambiguous[i];
        n_plain_cov += deep_eligible[i] ? 1 : 0;
    }
    auto deep = select_top(deep_score, deep_eligible, static_cast<int>(spec.p_deep * n_plain_cov + 0.5));

    for (int i = 0; i < n; ++i) {
        plans[i].covered = covered[i];
        plans[i].known = known[i];
        plans[i].ambiguous = ambiguous[i];
        plans[i].deep = deep[i];
    }

    // -- memory and wrong-answer pools --------------------------------------
    // Wrong answers are other questions' golds of the same type, so a wrong
    // claim is shaped exactly like a right one (token F1 exactly 0 is still
    // guaranteed because golds are globally unique).
    std::map<std::string, std::vector<int>> by_wh;
    for (int i = 0; i < n; ++i) by_wh[plans[i].wh].push_back(i);
    auto draw_wrong = [&](const Plan& p, Rng& r) -> std::string {
        const auto& pool = by_wh[p.wh];
        for (int attempt = 0; attempt < 50; ++attempt) {
            const auto& other = plans[pool[r.uniform_int(pool.size())]];
            if (other.gold != p.gold) return other.gold;
        }
        std::set<std::string> scratch(used_answers);
        return make_gold(p.wh, r, scratch);
    };
    for (auto& p : plans) {
        Rng wr(sub_seed(spec.seed, "wrong:" + p.id));
        for (int i = 0; i < 12; ++i) p.wrong.push_back(draw_wrong(p, wr));
        p.memory_answer = p.known ? p.gold : p.wrong[p.wrong.size() - 1];
    }

    // -- assemble + verify loop ---------------------------------------------
    const int n_background = std::max(4, n / 10);
    World world;
    Index idx;
    std::string last_offender;
    for (int round = 0;; ++round) {
        if (round > 100) {
            // dump the offender's per-template rankings so an infeasible
            // spec can be diagnosed from the message alone
            std::string detail;
            const std::string off_id = last_offender.substr(0, last_offender.find(' '));
            for (const auto& p : plans) {
                if (p.id != off_id) continue;
                const Question q{p.id, question_text(p), {p.gold}};
                for (int t = 0; t < 4; ++t) {
                    const std::string query = apply_template(static_cast<RewriteTemplate>(t), q.text);
                    detail += "\n  t" + std::to_string(t) + " '" + query + "':";
                    const auto obs = search(idx, query, spec.top_k + 3);
                    for (const auto& sn : obs.snippets)
                        detail += " " + sn.doc_id + "=" + fmt_fixed(sn.score, 2);
                }
                break;
            }
            throw GenerationError("retrieval guarantees not met after 100 rounds (offender: " +
                                  last_offender + ")" + detail);
        }
        std::vector<Document> corpus;
        for (const auto& p : plans)
            for (auto& d : docs_for(p, spec)) corpus.push_back(std::move(d));
        Rng bg(sub_seed(spec.seed, "background"));
        for (int i = 0; i < n_background; ++i) {
            Document d;
            char buf[16];
            std::snprintf(buf, sizeof buf, "d_bg%03d", i);
            d.id = buf;
            d.title = "archive notes";
            d.text = filler_words(bg, 10 + static_cast<int>(bg.uniform_int(8)));
            corpus.push_back(std::move(d));
        }
        idx = build_index(corpus);

        bool clean = true;
        for (auto& p : plans) {
            if (!p.covered) continue;
            const Question q{p.id, question_text(p), {p.gold}};
            auto rank_for = [&](RewriteTemplate t) {
                return gold_rank(idx, apply_template(t, q.text), q.gold_answers);
            };
            if (p.ambiguous) {
                const int id_rank = rank_for(RewriteTemplate::Identity);
                const int th_rank = rank_for(RewriteTemplate::TypeHint);
                if (id_rank <= spec.top_k) {
                    ++p.amb_boost;
                    clean = false;
                    last_offender = p.id + " amb id_rank=" + std::to_string(id_rank);
                }
                if (th_rank != 1) {
                    ++p.type_boost;
                    clean = false;
                    last_offender = p.id + " amb th_rank=" + std::to_string(th_rank);
                }
            } else if (p.deep) {
                // No rewrite may surface the gold at rank 1 (depth 1 must
                // fail), and the best rewrite must keep it within top_k
                // (depth top_k must succeed). Entity-only rewrites rank the
                // same-entity docs purely by length, so sparse queries may
                // legitimately push the gold past top_k; only the minimum
                // across rewrites is constrained from above.
                int best = std::numeric_limits<int>::max();
                bool bumped = false;
                for (int t = 0; t < 4; ++t) {
                    const int r = rank_for(static_cast<RewriteTemplate>(t));
                    best = std::min(best, r);
                    if (r < 2) {
                        ++p.gold_pad;
                        clean = false;
                        last_offender = p.id + " deep rank=1 t=" + std::to_string(t);
                        bumped = true;
                        break;
                    }
                }
                if (!bumped && best > spec.top_k) {
                    if (p.gold_pad > 0)
                        --p.gold_pad;
                    else
                        ++p.shadow_pad;
                    clean = false;
                    last_offender = p.id + " deep best_rank=" + std::to_string(best);
                }
            } else {
                if (const int r = rank_for(RewriteTemplate::Identity); r != 1) {
                    ++p.gold_boost;
                    clean = false;
                    last_offender = p.id + " plain id_rank=" + std::to_string(r);
                }
            }
        }
        if (clean) {
            world.corpus = std::move(corpus);
            break;
        }
    }

    for (const auto& p : plans) {
        world.questions.push_back({p.id, question_text(p), {p.gold}});
        world.memory[p.id] = p.memory_answer;
    }
    world.oracle_map = compute_oracle_map(world.questions, idx);
    world.categories = compute_categories(world.questions, world.memory, idx, spec.top_k);
    return world;
}

// ---- bundle I/O ---------------------------------------------------------------

namespace worldgen {

inline void write_lines(const std::string& path, const std::vector<nlohmann::ordered_json>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& r : rows) out << r.dump() << "\n";
}

}  // namespace worldgen

inline void save_world(const std::string& dir, const World& w,
                       const WorldSpec* spec = nullptr) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::vector<nlohmann::ordered_json> rows;
    for (const auto& q : w.questions)
        rows.push_back({{"id", q.id}, {"text", q.text}, {"gold_answers", q.gold_answers}});
    worldgen::write_lines(dir + "/qa.jsonl", rows);

    save_corpus_jsonl(dir + "/corpus.jsonl", w.corpus);

    rows.clear();
    for (const auto& [qid, ans] : w.memory)
        rows.push_back({{"question_id", qid}, {"answer", ans}});
    worldgen::write_lines(dir + "/memory.jsonl", rows);

    rows.clear();
    for (const auto& [qid, t] : w.oracle_map)
        rows.push_back({{"question_id", qid}, {"template", t}});
    worldgen::write_lines(dir + "/oracle_map.jsonl", rows);

    rows.clear();
    for (const auto& [qid, c] : w.categories)
        rows.push_back({{"question_id", qid}, {"category", c}});
    worldgen::write_lines(dir + "/categories.jsonl", rows);

    nlohmann::ordered_json manifest;
    manifest["format"] = "rdlab-world-v1";
    manifest["counts"] = {{"questions", w.questions.size()}, {"documents", w.corpus.size()}};
    if (spec) {
        manifest["spec"] = {{"n_questions", spec->n_questions},
                            {"p_covered", spec->p_covered},
                            {"p_known", spec->p_known},
                            {"p_ambiguous", spec->p_ambiguous},
                            {"p_deep", spec->p_deep},
                            {"distractors_per_question", spec->distractors_per_question},
                            {"top_k", spec->top_k},
                            {"seed", spec->seed}};
    }
    std::ofstream mf(dir + "/manifest.json");
    if (!mf) throw IoError("cannot write " + dir + "/manifest.json");
    mf << manifest.dump(2) << "\n";
}

namespace worldgen {

inline std::vector<nlohmann::json> read_lines(const std::string& path, bool required) {
    std::ifstream in(path);
    if (!in) {
        if (required) throw IoError("cannot read " + path);
        return {};
    }
    std::vector<nlohmann::json> rows;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        try {
            rows.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw CorpusError(path + ":" + std::to_string(ln) + ": bad json: " + e.what());
        }
    }
    return rows;
}

}  // namespace worldgen

inline World load_world(const std::string& dir) {
    World w;
    for (const auto& r : worldgen::read_lines(dir + "/qa.jsonl", true)) {
        Question q;
        q.id = r.at("id").get<std::string>();
        q.text = r.at("text").get<std::string>();
        q.gold_answers = r.at("gold_answers").get<std::vector<std::string>>();
        w.questions.push_back(std::move(q));
    }
    w.corpus = load_corpus_jsonl(dir + "/corpus.jsonl");
    for (const auto& r : worldgen::read_lines(dir + "/memory.jsonl", false))
        w.memory[r.at("question_id").get<std::string>()] = r.at("answer").get<std::string>();
    for (const auto& r : worldgen::read_lines(dir + "/oracle_map.jsonl", false))
        w.oracle_map[r.at("question_id").get<std::string>()] = r.at("template").get<int>();
    for (const auto& r : worldgen::read_lines(dir + "/categories.jsonl", false))
        w.categories[r.at("question_id").get<std::string>()] = r.at("category").get<std::string>();
    return w;
}

/// External QA + corpus (+ optional memory) become a world: the oracle map
/// and categories are recomputed from retrieval behavior, exactly as the
/// generator would have labeled them.
inline World ingest_world(const std::string& qa_path, const std::string& corpus_path,
                          const std::string& memory_path, int top_k, bool permissive = false,
                          std::vector<std::string>* issues = nullptr) {
    World w;
    int ln = 0;
    for (const auto& r : worldgen::read_lines(qa_path, true)) {
        ++ln;
        try {
            Question q;
            q.id = r.at("id").get<std::string>();
            q.text = r.at("text").get<std::string>();
            q.gold_answers = r.at("gold_answers").get<std::vector<std::string>>();
            if (q.id.empty()) throw CorpusError("empty id");
            if (q.gold_answers.empty()) throw CorpusError("no gold answers");
            w.questions.push_back(std::move(q));
        } catch (const std::exception& e) {
            const std::string msg = qa_path + " record " + std::to_string(ln) + ": " + e.what();
            if (!permissive) throw CorpusError(msg);
            if (issues) issues->push_back(msg);
        }
    }
    if (w.questions.empty()) throw CorpusError(qa_path + ": no usable questions");
    w.corpus = load_corpus_jsonl(corpus_path, 0, permissive, issues);
    if (!memory_path.empty()) {
        int ml = 0;
        for (const auto& r : worldgen::read_lines(memory_path, true)) {
            ++ml;
            try {
                w.memory[r.at("question_id").get<std::string>()] =
                    r.at("answer").get<std::string>();
            } catch (const std::exception& e) {
                const std::string msg =
                    memory_path + " record " + std::to_string(ml) + ": " + e.what();
                if (!permissive) throw CorpusError(msg);
                if (issues) issues->push_back(msg);
            }
        }
    }
    const Index idx = build_index(w.corpus);
    w.oracle_map = compute_oracle_map(w.questions, idx);
    w.categories = compute_categories(w.questions, w.memory, idx, top_k);
    return w;
}

}  // namespace rdlab
