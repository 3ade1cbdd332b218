#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdlab/common.hpp"
#include "rdlab/env.hpp"
#include "rdlab/env_types.hpp"
#include "rdlab/text.hpp"

namespace rdlab {

/// The policy's private store of claimed answers (question id -> answer).
/// Entries may be wrong; nothing guarantees agreement with the golds.
using Memory = std::map<std::string, std::string>;

struct PolicyConfig {
    int dim = 1024;           // D: state feature dimension (3 hashed segments + 5 scalars)
    int cand_hash_dim = 256;  // hashed descriptor block inside candidate embeddings
    int hidden_dim = 0;       // optional tanh trunk width; 0 keeps heads linear over features
    int n_templates = 4;
    int max_candidates_per_snippet = 8;
    int ngram_max = 4;
    std::uint64_t hash_seed = 0x9d2c5680a7b4f1e3ULL;

    int head_dim() const { return hidden_dim > 0 ? hidden_dim : dim; }
    int cand_dim() const { return 5 + cand_hash_dim + head_dim(); }
};

// ---- featurizer ------------------------------------------------------------

using FeatureVector = std::vector<double>;

struct FeatureLayout {
    int seg_question = 0;  // [0, seg_question)
    int seg_observation = 0;
    int seg_cross = 0;
    static constexpr int kScalars = 5;

    explicit FeatureLayout(int dim) {
        const int rest = dim - kScalars;
        if (rest < 3) throw ConfigError("feature dim too small: " + std::to_string(dim));
        seg_question = rest / 3 + rest % 3;
        seg_observation = rest / 3;
        seg_cross = rest / 3;
    }
    int obs_begin() const { return seg_question; }
    int cross_begin() const { return seg_question + seg_observation; }
    int scalar_begin() const { return seg_question + seg_observation + seg_cross; }
};

namespace detail {

inline void bump(FeatureVector& f, int begin, int size, std::string_view key,
                 std::uint64_t seed) {
    f[begin + static_cast<int>(fnv1a64(key, seed) % static_cast<std::uint64_t>(size))] += 1.0;
}

inline void l2_normalize(FeatureVector& f, int begin, int end) {
    double ss = 0.0;
    for (int i = begin; i < end; ++i) ss += f[i] * f[i];
    if (ss <= 0.0) return;
    const double inv = 1.0 / std::sqrt(ss);
    for (int i = begin; i < end; ++i) f[i] *= inv;
}

}  // namespace detail

/// Hashed bag-of-words state features. Segments: question tokens, observation
/// tokens, question-token x interrogative crosses, then a 5-wide scalar block
/// {retrieve count, obs tokens / 100, max snippet score / 10,
///  candidate count / 10, bias 1}. Hashed segments are L2-normalized so head
/// gradients stay on a comparable scale regardless of text length.
inline FeatureVector featurize(const StateView& view, const PolicyConfig& cfg,
                               int candidate_count) {
    const FeatureLayout lay(cfg.dim);
    FeatureVector f(cfg.dim, 0.0);

    const auto qtoks = normalize_tokens(*view.question_text);
    const std::string wh = wh_word_of(*view.question_text);

    for (const auto& t : qtoks) detail::bump(f, 0, lay.seg_question, "q:" + t, cfg.hash_seed);
    detail::l2_normalize(f, 0, lay.seg_question);

    int obs_tokens = 0;
    double max_score = 0.0;
    for (const auto& obs : *view.observations) {
        for (const auto& t : normalize_tokens(obs.concatenated_text)) {
            detail::bump(f, lay.obs_begin(), lay.seg_observation, "o:" + t, cfg.hash_seed);
            ++obs_tokens;
        }
        for (const auto& sn : obs.snippets) max_score = std::max(max_score, sn.score);
    }
    detail::l2_normalize(f, lay.obs_begin(), lay.obs_begin() + lay.seg_observation);

    if (!wh.empty()) {
        for (const auto& t : qtoks)
            detail::bump(f, lay.cross_begin(), lay.seg_cross, "x:" + wh + "|" + t, cfg.hash_seed);
        detail::l2_normalize(f, lay.cross_begin(), lay.cross_begin() + lay.seg_cross);
    }

    const int sb = lay.scalar_begin();
    f[sb + 0] = static_cast<double>(view.retrieve_count());
    f[sb + 1] = static_cast<double>(obs_tokens) / 100.0;
    f[sb + 2] = max_score / 10.0;
    f[sb + 3] = static_cast<double>(candidate_count) / 10.0;
    f[sb + 4] = 1.0;
    return f;
}

inline std::uint64_t feature_digest(const FeatureVector& f) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : f) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

// ---- query templates -------------------------------------------------------

enum class RewriteTemplate { Identity = 0, KeywordsOnly = 1, TypeHint = 2, QuoteFocus = 3 };

inline const char* template_name(RewriteTemplate t) {
    switch (t) {
        case RewriteTemplate::Identity: return "identity";
        case RewriteTemplate::KeywordsOnly: return "keywords_only";
        case RewriteTemplate::TypeHint: return "type_hint";
        case RewriteTemplate::QuoteFocus: return "quote_focus";
    }
    return "?";
}

namespace detail {

inline std::string keywords_of(const std::string& question) {
    std::string out;
    for (const auto& w : surface_words(question)) {
        if (is_stopword(lower_copy(w))) continue;
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

inline std::string type_token_for(const std::string& wh) {
    if (wh == "who" || wh == "whom") return "person";
    if (wh == "when") return "date";
    if (wh == "where") return "place";
    return "";
}

}  // namespace detail

/// Deterministic query rewrites. Every template falls back to the verbatim
/// question rather than ever emitting an empty query.
inline std::string apply_template(RewriteTemplate t, const std::string& question) {
    switch (t) {
        case RewriteTemplate::Identity:
            return question;
        case RewriteTemplate::KeywordsOnly: {
            std::string kw = detail::keywords_of(question);
            return kw.empty() ? question : kw;
        }
        case RewriteTemplate::TypeHint: {
            std::string kw = detail::keywords_of(question);
            if (kw.empty()) kw = question;
            const std::string type = detail::type_token_for(wh_word_of(question));
            return type.empty() ? kw : kw + " " + type;
        }
        case RewriteTemplate::QuoteFocus: {
            // longest run of capitalized words, earliest on ties
            const auto words = surface_words(question);
            std::size_t best_begin = 0, best_len = 0, i = 0;
            while (i < words.size()) {
                if (std::isupper(static_cast<unsigned char>(words[i][0]))) {
                    std::size_t j = i;
                    while (j < words.size() &&
                           std::isupper(static_cast<unsigned char>(words[j][0])))
                        ++j;
                    if (j - i > best_len) {
                        best_len = j - i;
                        best_begin = i;
                    }
                    i = j;
                } else {
                    ++i;
                }
            }
            if (best_len == 0) return question;
            std::string out;
            for (std::size_t k = best_begin; k < best_begin + best_len; ++k) {
                if (!out.empty()) out.push_back(' ');
                out += words[k];
            }
            return out;
        }
    }
    return question;
}

// ---- answer candidates -----------------------------------------------------

struct AnswerCandidate {
    std::string text;
    bool from_memory = false;
    double snippet_score = 0.0;  // 0 for memory and fallback candidates
    double overlap = 0.0;        // fraction of candidate tokens found in the question
    int token_count = 0;
};

namespace detail {

inline AnswerCandidate make_candidate(const std::string& text, bool from_memory, double score,
                                      const std::vector<std::string>& question_token_set) {
    AnswerCandidate c;
    c.text = text;
    c.from_memory = from_memory;
    c.snippet_score = score;
    const auto toks = normalize_tokens(text);
    c.token_count = static_cast<int>(toks.size());
    if (!toks.empty()) {
        int inter = 0;
        for (const auto& t : toks)
            if (std::find(question_token_set.begin(), question_token_set.end(), t) !=
                question_token_set.end())
                ++inter;
        c.overlap = static_cast<double>(inter) / static_cast<double>(toks.size());
    }
    return c;
}

}  // namespace detail

/// Answer candidates, in deterministic order: the memory entry first, then
/// per snippet (rank order) either the snippet's answer span or question-
/// anchored n-grams, deduplicated by normalized text. Never empty: a lone
/// "" fallback is emitted when nothing else qualifies.
inline std::vector<AnswerCandidate> enumerate_candidates(const StateView& view,
                                                         const Memory& memory,
                                                         const PolicyConfig& cfg) {
    const auto qtoks = normalize_tokens(*view.question_text);
    std::vector<std::string> anchor_toks;  // non-stopword question tokens
    for (const auto& t : qtoks)
        if (!is_stopword(t)) anchor_toks.push_back(t);

    std::vector<AnswerCandidate> out;
    std::vector<std::string> seen;  // normalized texts already taken
    auto push_unique = [&](AnswerCandidate c) {
        std::string key = join_tokens(normalize_tokens(c.text));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
        seen.push_back(std::move(key));
        out.push_back(std::move(c));
    };

    if (auto it = memory.find(*view.question_id); it != memory.end()) {
        push_unique(detail::make_candidate(it->second, true, 0.0, qtoks));
    }

    for (const auto& obs : *view.observations) {
        for (const auto& sn : obs.snippets) {
            if (sn.answer_span) {
                push_unique(detail::make_candidate(*sn.answer_span, false, sn.score, qtoks));
                continue;
            }
            const auto stoks = normalize_tokens(sn.text);
            int taken = 0;
            for (std::size_t start = 0;
                 start < stoks.size() && taken < cfg.max_candidates_per_snippet; ++start) {
                for (int len = 1; len <= cfg.ngram_max && taken < cfg.max_candidates_per_snippet;
                     ++len) {
                    if (start + static_cast<std::size_t>(len) > stoks.size()) break;
                    bool anchored = false;
                    for (int k = 0; k < len && !anchored; ++k)
                        anchored = std::find(anchor_toks.begin(), anchor_toks.end(),
                                             stoks[start + k]) != anchor_toks.end();
                    if (!anchored) continue;
                    std::string text;
                    for (int k = 0; k < len; ++k) {
                        if (k) text.push_back(' ');
                        text += stoks[start + k];
                    }
                    const std::size_t before = out.size();
                    push_unique(detail::make_candidate(text, false, sn.score, qtoks));
                    if (out.size() > before) ++taken;
                }
            }
        }
    }

    if (out.empty()) out.push_back(detail::make_candidate("", false, 0.0, qtoks));
    return out;
}

/// Per-candidate embedding: 5 scalars, a hashed descriptor block (candidate
/// tokens and their shapes, crossed with the question's interrogative), and
/// the head-space state projection gated on the memory flag. The gate is what
/// lets the answer head learn per-question trust in its own memory.
inline std::vector<double> candidate_embedding(const AnswerCandidate& c,
                                               const std::vector<double>& head_input,
                                               const std::string& wh, const PolicyConfig& cfg) {
    std::vector<double> phi(cfg.cand_dim(), 0.0);
    phi[0] = 1.0;
    phi[1] = c.from_memory ? 1.0 : 0.0;
    phi[2] = c.snippet_score / 10.0;
    phi[3] = c.overlap;
    phi[4] = static_cast<double>(c.token_count) / 4.0;

    const int hb = 5;
    for (const auto& t : normalize_tokens(c.text)) {
        detail::bump(phi, hb, cfg.cand_hash_dim, "ct:" + t, cfg.hash_seed);
        detail::bump(phi, hb, cfg.cand_hash_dim, "wc:" + wh + "|" + t, cfg.hash_seed);
        detail::bump(phi, hb, cfg.cand_hash_dim, "ws:" + wh + "|" + token_shape(t), cfg.hash_seed);
    }
    detail::l2_normalize(phi, hb, hb + cfg.cand_hash_dim);

    if (c.from_memory) {
        const int zb = hb + cfg.cand_hash_dim;
        for (int i = 0; i < cfg.head_dim(); ++i) phi[zb + i] = head_input[i];
    }
    return phi;
}

// ---- parameters ------------------------------------------------------------

struct PolicyParams {
    PolicyConfig config;
    std::vector<double> w_dec;  // 2 x head_dim, row-major [answer; query]
    std::vector<double> w_rew;  // n_templates x head_dim
    std::vector<double> w_ans;  // cand_dim
    std::vector<double> w_val;  // head_dim
    std::vector<double> w_hid;  // hidden_dim x dim (empty when linear)
};

/// Heads start at zero (uniform behavior); the optional trunk gets small
/// deterministic values derived from the hash seed so it is trainable.
inline PolicyParams init_params(const PolicyConfig& cfg) {
    PolicyParams p;
    p.config = cfg;
    const int z = cfg.head_dim();
    p.w_dec.assign(2 * static_cast<std::size_t>(z), 0.0);
    p.w_rew.assign(static_cast<std::size_t>(cfg.n_templates) * z, 0.0);
    p.w_ans.assign(cfg.cand_dim(), 0.0);
    p.w_val.assign(z, 0.0);
    if (cfg.hidden_dim > 0) {
        p.w_hid.resize(static_cast<std::size_t>(cfg.hidden_dim) * cfg.dim);
        std::uint64_t s = splitmix64(cfg.hash_seed ^ 0x7261696eULL);
        for (auto& w : p.w_hid) {
            s = splitmix64(s);
            w = (static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5) * 0.2;
        }
    }
    return p;
}

/// Feature vector -> head input (identity when linear, tanh trunk otherwise).
inline std::vector<double> head_input(const PolicyParams& p, const FeatureVector& f) {
    if (p.config.hidden_dim <= 0) return f;
    const int h = p.config.hidden_dim, d = p.config.dim;
    std::vector<double> z(h, 0.0);
    for (int i = 0; i < h; ++i) {
        double acc = 0.0;
        const double* row = p.w_hid.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) acc += row[j] * f[j];
        z[i] = std::tanh(acc);
    }
    return z;
}

// ---- distributions ----------------------------------------------------------

/// Softmax over the unmasked entries; masked entries get probability exactly 0.
inline std::vector<double> masked_softmax(const std::vector<double>& logits,
                                          const std::vector<bool>& mask) {
    std::vector<double> p(logits.size(), 0.0);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) sum += std::exp(logits[i] - mx);
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) p[i] = std::exp(logits[i] - mx) / sum;
    return p;
}

struct DecisionDist {
    std::vector<double> logits;  // pre-mask: [answer, query]
    std::vector<double> probs;   // post-mask
};

inline bool kind_allowed(const std::vector<ActionKind>& allowed, ActionKind k) {
    return std::find(allowed.begin(), allowed.end(), k) != allowed.end();
}

inline DecisionDist decision_distribution(const PolicyParams& p, const std::vector<double>& z,
                                          const std::vector<ActionKind>& allowed) {
    const int n = static_cast<int>(z.size());
    DecisionDist d;
    d.logits.assign(2, 0.0);
    for (int r = 0; r < 2; ++r) {
        const double* row = p.w_dec.data() + static_cast<std::size_t>(r) * n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += row[j] * z[j];
        d.logits[r] = acc;
    }
    std::vector<bool> mask = {kind_allowed(allowed, ActionKind::Answer),
                              kind_allowed(allowed, ActionKind::Query)};
    d.probs = masked_softmax(d.logits, mask);
    return d;
}

struct SubDist {
    std::vector<double> logits;
    std::vector<double> probs;
};

inline SubDist rewrite_distribution(const PolicyParams& p, const std::vector<double>& z) {
    const int n = static_cast<int>(z.size());
    SubDist d;
    d.logits.assign(p.config.n_templates, 0.0);
    for (int r = 0; r < p.config.n_templates; ++r) {
        const double* row = p.w_rew.data() + static_cast<std::size_t>(r) * n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += row[j] * z[j];
        d.logits[r] = acc;
    }
    d.probs = masked_softmax(d.logits, std::vector<bool>(d.logits.size(), true));
    return d;
}

inline SubDist answer_distribution(const PolicyParams& p,
                                   const std::vector<std::vector<double>>& cand_phi) {
    SubDist d;
    d.logits.assign(cand_phi.size(), 0.0);
    for (std::size_t c = 0; c < cand_phi.size(); ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cand_phi[c].size(); ++j) acc += p.w_ans[j] * cand_phi[c][j];
        d.logits[c] = acc;
    }
    d.probs = masked_softmax(d.logits, std::vector<bool>(d.logits.size(), true));
    return d;
}

inline double value_estimate(const PolicyParams& p, const std::vector<double>& z) {
    double acc = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) acc += p.w_val[j] * z[j];
    return acc;
}

// ---- full forward pass ------------------------------------------------------

struct Forward {
    FeatureVector features;
    std::vector<double> z;  // head input
    std::vector<AnswerCandidate> candidates;
    std::vector<std::vector<double>> cand_phi;
    DecisionDist decision;
    SubDist rewrite;
    SubDist answer;
    double value = 0.0;
    std::uint64_t digest = 0;
};

inline Forward forward_pass(const PolicyParams& p, const StateView& view, const Memory& memory,
                            const std::vector<ActionKind>& allowed) {
    Forward fw;
    fw.candidates = enumerate_candidates(view, memory, p.config);
    fw.features = featurize(view, p.config, static_cast<int>(fw.candidates.size()));
    fw.z = head_input(p, fw.features);
    const std::string wh = wh_word_of(*view.question_text);
    fw.cand_phi.reserve(fw.candidates.size());
    for (const auto& c : fw.candidates)
        fw.cand_phi.push_back(candidate_embedding(c, fw.z, wh, p.config));
    fw.decision = decision_distribution(p, fw.z, allowed);
    fw.rewrite = rewrite_distribution(p, fw.z);
    fw.answer = answer_distribution(p, fw.cand_phi);
    fw.value = value_estimate(p, fw.z);
    fw.digest = feature_digest(fw.features);
    return fw;
}

// ---- action selection --------------------------------------------------------

namespace detail {

inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

/// log with an underflow floor, so threshold-forced picks of numerically
/// dead branches still serialize as finite values.
inline double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

inline std::size_t sample_index(const std::vector<double>& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    // numerical leftovers land on the last positive entry
    for (std::size_t i = probs.size(); i-- > 0;)
        if (probs[i] > 0.0) return i;
    return 0;
}

}  // namespace detail

/// Composite action choice: pick a kind, then the kind's sub-choice. The
/// reported log-prob is log P(kind) + log P(sub-choice); a kind forced by the
/// mask has probability 1 and contributes nothing.
inline ActionSample sample_action(const PolicyParams& p, const StateView& view,
                                  const Memory& memory, const std::vector<ActionKind>& allowed,
                                  SampleMode mode, Rng& rng) {
    const Forward fw = forward_pass(p, view, memory, allowed);
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
        std::size_t t;
        if (mode.kind == SampleMode::Kind::Sample) t = detail::sample_index(fw.rewrite.probs, rng);
        else t = detail::argmax(fw.rewrite.probs);
        out.action = {ActionKind::Query,
                      apply_template(static_cast<RewriteTemplate>(t), *view.question_text)};
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

/// PolicyHandle adapter used by the episode loop and the evaluators.
class ScoredPolicy final : public PolicyHandle {
  public:
    ScoredPolicy(const PolicyParams& params, const Memory& memory)
        : params_(&params), memory_(&memory) {}

    ActionSample act(const StateView& view, const std::vector<ActionKind>& allowed,
                     SampleMode mode, Rng& rng) const override {
        return sample_action(*params_, view, *memory_, allowed, mode, rng);
    }

  private:
    const PolicyParams* params_;
    const Memory* memory_;
};

// ---- checkpoints -------------------------------------------------------------

inline nlohmann::json params_to_json(const PolicyParams& p) {
    return nlohmann::json{
        {"format", "rdlab-checkpoint-v1"},
        {"config",
         {{"dim", p.config.dim},
          {"cand_hash_dim", p.config.cand_hash_dim},
          {"hidden_dim", p.config.hidden_dim},
          {"n_templates", p.config.n_templates},
          {"max_candidates_per_snippet", p.config.max_candidates_per_snippet},
          {"ngram_max", p.config.ngram_max},
          {"hash_seed", p.config.hash_seed}}},
        {"w_dec", p.w_dec},
        {"w_rew", p.w_rew},
        {"w_ans", p.w_ans},
        {"w_val", p.w_val},
        {"w_hid", p.w_hid}};
}

inline PolicyParams params_from_json(const nlohmann::json& j) {
    if (!j.contains("format") || j["format"] != "rdlab-checkpoint-v1")
        throw ConfigError("checkpoint: unknown format marker");
    PolicyParams p;
    const auto& c = j.at("config");
    p.config.dim = c.at("dim").get<int>();
    p.config.cand_hash_dim = c.at("cand_hash_dim").get<int>();
    p.config.hidden_dim = c.at("hidden_dim").get<int>();
    p.config.n_templates = c.at("n_templates").get<int>();
    p.config.max_candidates_per_snippet = c.at("max_candidates_per_snippet").get<int>();
    p.config.ngram_max = c.at("ngram_max").get<int>();
    p.config.hash_seed = c.at("hash_seed").get<std::uint64_t>();
    p.w_dec = j.at("w_dec").get<std::vector<double>>();
    p.w_rew = j.at("w_rew").get<std::vector<double>>();
    p.w_ans = j.at("w_ans").get<std::vector<double>>();
    p.w_val = j.at("w_val").get<std::vector<double>>();
    p.w_hid = j.at("w_hid").get<std::vector<double>>();

    const std::size_t z = static_cast<std::size_t>(p.config.head_dim());
    if (p.w_dec.size() != 2 * z || p.w_rew.size() != static_cast<std::size_t>(p.config.n_templates) * z ||
        p.w_ans.size() != static_cast<std::size_t>(p.config.cand_dim()) || p.w_val.size() != z ||
        p.w_hid.size() != (p.config.hidden_dim > 0
                               ? static_cast<std::size_t>(p.config.hidden_dim) * p.config.dim
                               : 0)) {
        throw ConfigError("checkpoint: weight array sizes do not match config dimensions");
    }
    return p;
}

inline void save_checkpoint(const std::string& path, const PolicyParams& p) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out << params_to_json(p).dump(2) << "\n";
}

inline PolicyParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("checkpoint: invalid json in " + path);
    return params_from_json(j);
}

}  // namespace rdlab
