#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rdlab {

struct Question {
    std::string id;
    std::string text;
    std::vector<std::string> gold_answers;
};

struct Snippet {
    std::string doc_id;
    double score = 0.0;
    std::string text;
    std::optional<std::string> answer_span;  // copied from the source document
};

/// One retrieval result. Snippets arrive sorted (score desc, doc id asc) and
/// concatenated_text joins their texts with " | ". A query with no positive
/// scoring document yields an Observation with no snippets and empty text.
struct Observation {
    std::string query;
    std::vector<Snippet> snippets;
    std::string concatenated_text;
};

enum class ActionKind { Answer, Query };

struct Action {
    ActionKind kind = ActionKind::Answer;
    std::string text;
};

/// Episode state: the question plus every observation gathered so far.
/// The retrieve count is implied by the observation list (failed lookups
/// still append an empty Observation, so the quota always advances).
struct State {
    Question question;
    std::vector<Observation> observations;

    int retrieve_count() const { return static_cast<int>(observations.size()); }
};

/// What the decision policy is allowed to see. Gold answers stay behind on
/// Question and never cross this interface.
struct StateView {
    const std::string* question_id = nullptr;
    const std::string* question_text = nullptr;
    const std::vector<Observation>* observations = nullptr;

    int retrieve_count() const { return static_cast<int>(observations->size()); }
};

inline StateView make_view(const State& s) {
    return StateView{&s.question.id, &s.question.text, &s.observations};
}

struct EnvConfig {
    int quota_n = 1;      // forced to answer once this many queries were spent
    int top_k = 4;        // snippets per retrieval
    double alpha = 0.2;   // per-query penalty
    double gamma = 0.99;  // discount on the episode return
};

/// How the policy turns head scores into an action.
///  Sample       draw from the composite distribution
///  Greedy       argmax at both stages
///  Threshold    answer iff the pre-mask answer logit exceeds tau (sub-choices greedy)
///  ProbThreshold  answer iff P(answer) exceeds tau
struct SampleMode {
    enum class Kind { Sample, Greedy, Threshold, ProbThreshold };
    Kind kind = Kind::Sample;
    double tau = 0.0;

    static SampleMode sample() { return {Kind::Sample, 0.0}; }
    static SampleMode greedy() { return {Kind::Greedy, 0.0}; }
    static SampleMode threshold(double tau) { return {Kind::Threshold, tau}; }
    static SampleMode prob_threshold(double tau) { return {Kind::ProbThreshold, tau}; }
};

struct TrajectoryStep {
    ActionKind kind = ActionKind::Answer;
    std::string text;
    double log_prob = 0.0;
    double value = 0.0;
    double reward = 0.0;
    std::uint64_t features_digest = 0;
    int sub_index = 0;  // template index for queries, candidate index for answers
};

struct Trajectory {
    std::string question_id;
    std::vector<TrajectoryStep> steps;
    std::string final_answer;
    double total_return = 0.0;  // discounted by EnvConfig::gamma
};

}  // namespace rdlab
