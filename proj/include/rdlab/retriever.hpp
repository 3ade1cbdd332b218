#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rdlab/common.hpp"
#include "rdlab/env_types.hpp"
#include "rdlab/text.hpp"

namespace rdlab {

struct Document {
    std::string id;
    std::string title;
    std::string text;
    std::optional<std::string> answer_span;  // gold-bearing phrase, when known
};

struct Posting {
    int doc = 0;
    int tf = 0;
};

/// In-memory inverted index over normalize_tokens(title + " " + text).
struct Index {
    std::vector<Document> docs;  // input order preserved
    std::unordered_map<std::string, std::vector<Posting>> postings;
    std::vector<int> doc_len;
    double avgdl = 0.0;

    int size() const { return static_cast<int>(docs.size()); }
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

inline Index build_index(const std::vector<Document>& docs) {
    Index ix;
    ix.docs = docs;
    ix.doc_len.resize(docs.size(), 0);
    std::unordered_map<std::string, int> seen_ids;
    long total_len = 0;
    for (int d = 0; d < static_cast<int>(docs.size()); ++d) {
        if (!seen_ids.emplace(docs[d].id, d).second) {
            throw CorpusError("duplicate document id: " + docs[d].id);
        }
        auto toks = normalize_tokens(docs[d].title + " " + docs[d].text);
        ix.doc_len[d] = static_cast<int>(toks.size());
        total_len += ix.doc_len[d];
        std::unordered_map<std::string, int> tf;
        for (const auto& t : toks) ++tf[t];
        for (const auto& [tok, n] : tf) {
            auto& plist = ix.postings[tok];
            plist.push_back(Posting{d, n});
        }
    }
    // postings in doc order makes accumulation order independent of hash layout
    for (auto& [tok, plist] : ix.postings) {
        std::sort(plist.begin(), plist.end(),
                  [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
    }
    ix.avgdl = docs.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(docs.size());
    return ix;
}

/// Non-negative idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
inline double bm25_idf(const Index& ix, const std::string& term) {
    auto it = ix.postings.find(term);
    const double df = it == ix.postings.end() ? 0.0 : static_cast<double>(it->second.size());
    const double n = static_cast<double>(ix.size());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

inline double bm25_term_weight(int tf, int dl, double avgdl, const Bm25Params& p) {
    const double norm = p.k1 * (1.0 - p.b + p.b * (avgdl > 0.0 ? dl / avgdl : 0.0));
    return (static_cast<double>(tf) * (p.k1 + 1.0)) / (static_cast<double>(tf) + norm);
}

/// Okapi BM25 of one document against a query. Duplicate query tokens count
/// once (set semantics).
inline double bm25_score(const Index& ix, const std::string& query, const std::string& doc_id,
                         const Bm25Params& p = {}) {
    int d = -1;
    for (int i = 0; i < ix.size(); ++i)
        if (ix.docs[i].id == doc_id) { d = i; break; }
    if (d < 0) throw CorpusError("unknown document id: " + doc_id);

    auto qtoks = normalize_tokens(query);
    std::vector<std::string> distinct;
    for (auto& t : qtoks)
        if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);

    double score = 0.0;
    for (const auto& t : distinct) {
        auto it = ix.postings.find(t);
        if (it == ix.postings.end()) continue;
        for (const auto& post : it->second) {
            if (post.doc == d) {
                score += bm25_idf(ix, t) * bm25_term_weight(post.tf, ix.doc_len[d], ix.avgdl, p);
                break;
            }
        }
    }
    return score;
}

/// Top-k retrieval. Zero-score documents are dropped; ties break by score
/// desc then doc id asc; an unmatched query yields an empty Observation.
inline Observation search(const Index& ix, const std::string& query, int k,
                          const Bm25Params& p = {}) {
    Observation obs;
    obs.query = query;
    if (k <= 0 || ix.size() == 0) return obs;

    auto qtoks = normalize_tokens(query);
    std::vector<std::string> distinct;
    for (auto& t : qtoks)
        if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);

    std::vector<double> scores(ix.docs.size(), 0.0);
    for (const auto& t : distinct) {
        auto it = ix.postings.find(t);
        if (it == ix.postings.end()) continue;
        const double idf = bm25_idf(ix, t);
        for (const auto& post : it->second) {
            scores[post.doc] += idf * bm25_term_weight(post.tf, ix.doc_len[post.doc], ix.avgdl, p);
        }
    }

    std::vector<int> order;
    for (int d = 0; d < ix.size(); ++d)
        if (scores[d] > 0.0) order.push_back(d);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ix.docs[a].id < ix.docs[b].id;
    });
    if (static_cast<int>(order.size()) > k) order.resize(k);

    for (int d : order) {
        Snippet s;
        s.doc_id = ix.docs[d].id;
        s.score = scores[d];
        s.text = ix.docs[d].text;
        s.answer_span = ix.docs[d].answer_span;
        obs.snippets.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < obs.snippets.size(); ++i) {
        if (i) obs.concatenated_text += " | ";
        obs.concatenated_text += obs.snippets[i].text;
    }
    return obs;
}

/// Anything that can answer a query with an Observation.
class RetrieverHandle {
  public:
    virtual ~RetrieverHandle() = default;
    virtual Observation retrieve(const std::string& query, int k) const = 0;
};

class IndexRetriever final : public RetrieverHandle {
  public:
    explicit IndexRetriever(Index ix, Bm25Params p = {}) : ix_(std::move(ix)), params_(p) {}

    Observation retrieve(const std::string& query, int k) const override {
        return search(ix_, query, k, params_);
    }

    const Index& index() const { return ix_; }

  private:
    Index ix_;
    Bm25Params params_;
};

// ---- corpus file I/O -------------------------------------------------------

/// Keep the first `budget` whitespace tokens of `text` (original casing).
/// A non-positive budget keeps everything.
inline std::string truncate_tokens(const std::string& text, int budget) {
    if (budget <= 0) return text;
    std::istringstream in(text);
    std::string tok, out;
    int n = 0;
    while (n < budget && in >> tok) {
        if (n) out.push_back(' ');
        out += tok;
        ++n;
    }
    return out;
}

/// JSONL corpus: one {"id","title","text","answer_span"?} object per line.
/// In permissive mode malformed lines are skipped and reported by number.
inline std::vector<Document> load_corpus_jsonl(const std::string& path,
                                               int snippet_token_budget = 0,
                                               bool permissive = false,
                                               std::vector<std::string>* issues = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<Document> docs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        std::string problem;
        if (j.is_discarded()) {
            problem = "invalid json";
        } else if (!j.contains("id") || !j["id"].is_string() || !j.contains("title") ||
                   !j["title"].is_string() || !j.contains("text") || !j["text"].is_string()) {
            problem = "missing id/title/text string fields";
        }
        if (!problem.empty()) {
            std::string msg = "corpus line " + std::to_string(lineno) + ": " + problem;
            if (!permissive) throw CorpusError(msg);
            if (issues) issues->push_back(msg);
            continue;
        }
        Document d;
        d.id = j["id"].get<std::string>();
        d.title = j["title"].get<std::string>();
        d.text = truncate_tokens(j["text"].get<std::string>(), snippet_token_budget);
        if (j.contains("answer_span") && j["answer_span"].is_string())
            d.answer_span = j["answer_span"].get<std::string>();
        docs.push_back(std::move(d));
    }
    return docs;
}

inline void save_corpus_jsonl(const std::string& path, const std::vector<Document>& docs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write corpus file: " + path);
    for (const auto& d : docs) {
        nlohmann::json j;
        j["id"] = d.id;
        j["title"] = d.title;
        j["text"] = d.text;
        if (d.answer_span) j["answer_span"] = *d.answer_span;
        out << j.dump() << "\n";
    }
}

}  // namespace rdlab
