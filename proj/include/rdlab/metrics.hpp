#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rdlab/env_types.hpp"
#include "rdlab/text.hpp"

namespace rdlab {

struct RewardConfig {
    double alpha = 0.2;   // query cost
    double gamma = 0.99;  // discount
    double kl_beta = 0.0; // reward-side KL penalty weight (0 = off)
};

/// 1.0 when the normalized prediction equals any normalized gold, else 0.0.
inline double exact_match(std::string_view pred, const std::vector<std::string>& golds) {
    const std::string p = join_tokens(normalize_tokens(pred));
    for (const auto& g : golds) {
        if (p == join_tokens(normalize_tokens(g))) return 1.0;
    }
    return 0.0;
}

/// Token-multiset F1 against the best-matching gold. Both sides empty after
/// normalization scores 1, exactly one side empty scores 0.
inline double token_f1(std::string_view pred, const std::vector<std::string>& golds) {
    const auto ptoks = normalize_tokens(pred);
    std::map<std::string, int> pcount;
    for (const auto& t : ptoks) ++pcount[t];

    double best = 0.0;
    for (const auto& g : golds) {
        const auto gtoks = normalize_tokens(g);
        if (ptoks.empty() && gtoks.empty()) { best = std::max(best, 1.0); continue; }
        if (ptoks.empty() || gtoks.empty()) continue;

        std::map<std::string, int> gcount;
        for (const auto& t : gtoks) ++gcount[t];
        int overlap = 0;
        for (const auto& [tok, n] : pcount) {
            auto it = gcount.find(tok);
            if (it != gcount.end()) overlap += std::min(n, it->second);
        }
        if (overlap == 0) continue;
        const double precision = static_cast<double>(overlap) / static_cast<double>(ptoks.size());
        const double recall = static_cast<double>(overlap) / static_cast<double>(gtoks.size());
        best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
    return best;
}

/// True when some gold's normalized token sequence appears contiguously in
/// the normalized observation text.
inline bool hit(std::string_view observation_text, const std::vector<std::string>& golds) {
    const auto obs = normalize_tokens(observation_text);
    for (const auto& g : golds) {
        if (contains_subsequence(obs, normalize_tokens(g))) return true;
    }
    return false;
}

/// Per-step reward: a query costs alpha, a final answer earns EM + F1.
inline double step_reward(const Action& action, const Question& q, const RewardConfig& cfg) {
    if (action.kind == ActionKind::Query) return -cfg.alpha;
    return exact_match(action.text, q.gold_answers) + token_f1(action.text, q.gold_answers);
}

/// Sum of gamma^t * r_t, evaluated backwards (Horner form).
inline double discounted_return(const std::vector<double>& rewards, double gamma) {
    double acc = 0.0;
    for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) acc = *it + gamma * acc;
    return acc;
}

}  // namespace rdlab
