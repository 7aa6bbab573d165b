#pragma once

#include <stdexcept>
#include <string>

namespace trendrank {

/// Base for all pipeline failures. `code` is a stable machine-parsable
/// identifier; the CLI prints it and maps it to an exit class.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Input and artifact problems (exit class 3/4 in the CLI).
struct UnreadablePath : Error {
    explicit UnreadablePath(const std::string& path) : Error("unreadable_path", path) {}
};
struct MalformedRecord : Error {
    MalformedRecord(long line_no, const std::string& what)
        : Error("malformed_record", "line " + std::to_string(line_no) + ": " + what),
          line_no(line_no) {}
    long line_no;
};
struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id) : Error("duplicate_id", id), id(id) {}
    std::string id;
};

struct EmptyCorpus : Error {
    EmptyCorpus() : Error("empty_corpus", "no documents") {}
};
struct DegenerateVocab : Error {
    DegenerateVocab(std::size_t vocab, int k)
        : Error("degenerate_vocab",
                "vocab size " + std::to_string(vocab) + " < k=" + std::to_string(k)) {}
};

struct BadHeader : Error {
    explicit BadHeader(const std::string& what) : Error("bad_header", what) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension_mismatch", what) {}
};
struct MissingVector : Error {
    MissingVector(const std::string& doc_id, std::size_t position)
        : Error("missing_vector", doc_id + " @ " + std::to_string(position)),
          doc_id(doc_id), position(position) {}
    std::string doc_id;
    std::size_t position;
};

struct ZeroVector : Error {
    ZeroVector() : Error("zero_vector", "cosine of a zero-norm vector") {}
};
struct FewerThanTwoEmbedded : Error {
    FewerThanTwoEmbedded() : Error("fewer_than_two_embedded", "need >= 2 embedded keywords") {}
};
struct NonConsecutiveMonths : Error {
    NonConsecutiveMonths(const std::string& a, const std::string& b)
        : Error("non_consecutive_months", a + " -> " + b) {}
};

struct NoOverlap : Error {
    NoOverlap() : Error("no_overlap", "interest series share no months") {}
};
struct InsufficientFuture : Error {
    InsufficientFuture(const std::string& start, int n)
        : Error("insufficient_future", start + " + " + std::to_string(n) + " months") {}
};
struct MissingSeries : Error {
    explicit MissingSeries(const std::string& keyword) : Error("missing_series", keyword) {}
};
struct EmptyEvaluation : Error {
    EmptyEvaluation() : Error("empty_evaluation", "no labeled instances") {}
};
struct SingleClassGold : Error {
    SingleClassGold() : Error("single_class_gold", "need >= 1 positive and >= 1 negative") {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};
struct MissingStage : Error {
    explicit MissingStage(const std::string& stage) : Error("missing_stage", stage) {}
};
struct StaleArtifact : Error {
    explicit StaleArtifact(const std::string& path) : Error("stale_artifact", path) {}
};
struct UnknownPair : Error {
    explicit UnknownPair(const std::string& key) : Error("unknown_pair", key) {}
};
struct GoldMismatch : Error {
    GoldMismatch() : Error("gold_mismatch", "runs were evaluated against different gold standards") {}
};

}  // namespace trendrank
