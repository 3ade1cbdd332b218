#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace rdlab {

/// QA-style answer normalization: lowercase, delete punctuation characters,
/// whitespace-split, drop the articles {a, an, the}. Idempotent on its own
/// output when tokens are re-joined with single spaces.
inline std::vector<std::string> normalize_tokens(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            cleaned.push_back(' ');
        } else if (std::ispunct(c)) {
            // dropped entirely, SQuAD-style ("cat's" -> "cats")
        } else {
            cleaned.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < cleaned.size()) {
        while (i < cleaned.size() && cleaned[i] == ' ') ++i;
        std::size_t j = i;
        while (j < cleaned.size() && cleaned[j] != ' ') ++j;
        if (j > i) {
            std::string tok = cleaned.substr(i, j - i);
            if (tok != "a" && tok != "an" && tok != "the") out.push_back(std::move(tok));
        }
        i = j;
    }
    return out;
}

inline std::string join_tokens(const std::vector<std::string>& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out.push_back(' ');
        out += toks[i];
    }
    return out;
}

/// Words in surface order with punctuation stripped but case preserved.
/// Used by query templates, which keep the asker's casing.
inline std::vector<std::string> surface_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string lower_copy(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Function words dropped by the keyword-style query templates. Includes the
/// interrogatives so "Who was the producer of 9?" reduces to "producer 9".
inline bool is_stopword(std::string_view lower_tok) {
    static const std::array<std::string_view, 32> kStop = {
        "a",    "an",   "the",  "of",    "in",   "on",    "at",   "to",   "for",
        "was",  "were", "is",   "are",   "did",  "does",  "do",   "be",   "been",
        "it",   "its",  "this", "that",  "he",   "she",   // pronouns add noise to rewrites
        "who",  "whom", "what", "which", "when", "where", "why",  "how"};
    return std::find(kStop.begin(), kStop.end(), lower_tok) != kStop.end();
}

inline bool is_wh_word(std::string_view lower_tok) {
    static const std::array<std::string_view, 7> kWh = {"who",  "whom",  "what", "which",
                                                        "when", "where", "how"};
    return std::find(kWh.begin(), kWh.end(), lower_tok) != kWh.end();
}

/// First interrogative of the question, lowercased; "" when there is none.
inline std::string wh_word_of(std::string_view question) {
    for (const auto& w : surface_words(question)) {
        std::string lw = lower_copy(w);
        if (is_wh_word(lw)) return lw;
    }
    return "";
}

/// Coarse token shape used as a generalizable answer-type cue: "num" for
/// all-digit tokens, otherwise "al" plus the token's last two letters.
inline std::string token_shape(std::string_view tok) {
    bool all_digit = !tok.empty();
    for (unsigned char c : tok)
        if (!std::isdigit(c)) { all_digit = false; break; }
    if (all_digit) return "num";
    std::string tail(tok.substr(tok.size() > 2 ? tok.size() - 2 : 0));
    return "al" + lower_copy(tail);
}

/// True when `needle` occurs as a contiguous subsequence of `haystack`.
/// Empty needles do not count as hits.
inline bool contains_subsequence(const std::vector<std::string>& haystack,
                                 const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) { ok = false; break; }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace rdlab
