// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_EVALBOARD_HPP
#define ARPREP_EVALBOARD_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace arprep::eval {

// Gold/predicted label pairs for one task.
struct LabeledPredictions {
    std::string task;
    std::vector<std::pair<std::string, std::string>> pairs;  // (gold, predicted)
};

// Two-column file: <gold>TAB<predicted>, one pair per line.
LabeledPredictions load_predictions(const std::filesystem::path& file,
                                    std::string task = "task");

// F1 of the gold class with the smaller support; support ties go to the
// lexicographically smaller label. Requires exactly two gold classes.
// Zero-denominator precision/recall count as 0.
double f1_minority(const LabeledPredictions& preds);

// Unweighted mean of per-class F1 over the classes present in gold.
double f1_macro(const LabeledPredictions& preds);

// --- entity-level span F1 over IOB tags ---

struct IobSentence {
    std::vector<std::string> gold;
    std::vector<std::string> pred;
};

struct Span {
    size_t begin = 0;  // token index
    size_t end = 0;    // exclusive
    std::string type;

    friend bool operator==(const Span&, const Span&) = default;
};

// Standard IOB reading: B-X opens a span, I-X continues one of the same
// type (an orphan I-X opens a new span), O closes. Tags other than these
// are rejected.
std::vector<Span> extract_spans(const std::vector<std::string>& tags);

// A span counts iff type and both boundaries match.
double span_f1(const std::vector<IobSentence>& sentences);

// Three-column file: <token>TAB<gold>TAB<pred>, blank line between sentences.
std::vector<IobSentence> load_iob(const std::filesystem::path& file);

// --- checkpoint selection ---

struct ScoreMatrix {
    std::vector<int64_t> checkpoints;  // ordered training step counts
    std::vector<std::string> tasks;
    // scores[i][j]: checkpoint i on task j; nullopt marks a missing entry
    std::vector<std::vector<std::optional<double>>> scores;

    void validate() const;  // scores in [0,1], >=1 complete row, unique steps

    // CSV with a header row: checkpoint,<task>,... ; empty cells are missing.
    static ScoreMatrix load_csv(const std::filesystem::path& file);
};

enum class SelectionPolicy { kMean, kMeanRank };

std::string_view policy_name(SelectionPolicy p);

struct TaskSummary {
    std::string task;
    int64_t best_checkpoint = 0;
    double best_score = 0.0;
    double fluctuation = 0.0;  // max - min over present entries
};

struct SelectionReport {
    int64_t selected = 0;
    SelectionPolicy policy = SelectionPolicy::kMean;
    double selected_value = 0.0;  // mean score, or mean rank (1 = best)
    std::vector<TaskSummary> tasks;
    std::string caveat;

    std::string to_text() const;
    std::string to_json() const;
};

// mean: highest unweighted mean over tasks, checkpoints with missing entries
// excluded. mean_rank: best average per-task rank (fractional ranks, 1 =
// best). Ties break toward the earlier checkpoint.
SelectionReport select_checkpoint(const ScoreMatrix& matrix, SelectionPolicy policy);

// --- model comparison table ---

struct ModelScores {
    std::string model;
    ScoreMatrix matrix;
};

struct ComparisonTable {
    struct Row {
        std::string model;
        int64_t checkpoint = 0;
        std::vector<std::optional<double>> scores;  // parallel to tasks
    };
    std::vector<std::string> tasks;
    std::vector<Row> rows;
    std::vector<std::vector<bool>> best;  // [row][task], ties all marked

    std::string to_text() const;  // percent, one decimal, '*' marks per-task maxima
    std::string to_json() const;
};

// Each model contributes its selected checkpoint's scores.
ComparisonTable tabulate(const std::vector<ModelScores>& models,
                         SelectionPolicy policy = SelectionPolicy::kMean);

}  // namespace arprep::eval

#endif  // ARPREP_EVALBOARD_HPP
