// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/evalboard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace arprep::eval {

namespace fs = std::filesystem;

namespace {

struct Confusion {
    int64_t tp = 0;
    int64_t fp = 0;
    int64_t fn = 0;

    double f1() const {
        const int64_t denom = 2 * tp + fp + fn;
        return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    }
};

std::map<std::string, Confusion> confusion_by_class(const LabeledPredictions& preds) {
    std::map<std::string, Confusion> by_class;
    for (const auto& [gold, pred] : preds.pairs) {
        if (gold == pred) {
            ++by_class[gold].tp;
        } else {
            ++by_class[gold].fn;
            ++by_class[pred].fp;
        }
    }
    return by_class;
}

std::map<std::string, int64_t> gold_support(const LabeledPredictions& preds) {
    std::map<std::string, int64_t> support;
    for (const auto& [gold, pred] : preds.pairs) ++support[gold];
    return support;
}

}  // namespace

LabeledPredictions load_predictions(const fs::path& file, std::string task) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("predictions: cannot open " + file.string());
    LabeledPredictions preds;
    preds.task = std::move(task);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw std::runtime_error("predictions: " + file.string() + ":" +
                                     std::to_string(line_no) + ": expected <gold>TAB<pred>");
        preds.pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    if (preds.pairs.empty())
        throw std::runtime_error("predictions: " + file.string() + " is empty");
    return preds;
}

double f1_minority(const LabeledPredictions& preds) {
    if (preds.pairs.empty()) throw std::invalid_argument("f1_minority: empty input");
    auto support = gold_support(preds);
    if (support.size() != 2)
        throw std::invalid_argument("f1_minority: gold labels are not binary (" +
                                    std::to_string(support.size()) +
                                    " classes); use f1_macro for multi-class input");
    // std::map iterates labels in lexicographic order, so on a support tie
    // the first (smaller) label wins.
    auto minority = support.begin();
    for (auto it = std::next(support.begin()); it != support.end(); ++it)
        if (it->second < minority->second) minority = it;
    return confusion_by_class(preds)[minority->first].f1();
}

double f1_macro(const LabeledPredictions& preds) {
    if (preds.pairs.empty()) throw std::invalid_argument("f1_macro: empty input");
    auto support = gold_support(preds);
    auto by_class = confusion_by_class(preds);
    double sum = 0.0;
    for (const auto& entry : support) sum += by_class[entry.first].f1();
    return sum / static_cast<double>(support.size());
}

std::vector<Span> extract_spans(const std::vector<std::string>& tags) {
    std::vector<Span> spans;
    std::optional<Span> open;
    auto close = [&] {
        if (open) {
            spans.push_back(*open);
            open.reset();
        }
    };
    for (size_t i = 0; i < tags.size(); ++i) {
        const std::string& tag = tags[i];
        if (tag == "O") {
            close();
        } else if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
            std::string type = tag.substr(2);
            if (tag[0] == 'I' && open && open->type == type) {
                open->end = i + 1;
            } else {
                close();
                open = Span{i, i + 1, std::move(type)};
            }
        } else {
            throw std::invalid_argument("iob: malformed tag '" + tag + "' at token " +
                                        std::to_string(i));
        }
    }
    close();
    return spans;
}

double span_f1(const std::vector<IobSentence>& sentences) {
    int64_t tp = 0, gold_total = 0, pred_total = 0;
    for (const auto& sent : sentences) {
        if (sent.gold.size() != sent.pred.size())
            throw std::invalid_argument("iob: gold/pred tag counts differ within a sentence");
        auto gold = extract_spans(sent.gold);
        auto pred = extract_spans(sent.pred);
        gold_total += static_cast<int64_t>(gold.size());
        pred_total += static_cast<int64_t>(pred.size());
        for (const auto& g : gold)
            if (std::find(pred.begin(), pred.end(), g) != pred.end()) ++tp;
    }
    const int64_t denom = gold_total + pred_total;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::vector<IobSentence> load_iob(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("iob: cannot open " + file.string());
    std::vector<IobSentence> sentences;
    IobSentence cur;
    std::string line;
    size_t line_no = 0;
    auto flush = [&] {
        if (!cur.gold.empty()) {
            sentences.push_back(std::move(cur));
            cur = IobSentence{};
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            flush();
            continue;
        }
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw std::runtime_error("iob: " + file.string() + ":" + std::to_string(line_no) +
                                     ": expected <token>TAB<gold>TAB<pred>");
        cur.gold.push_back(line.substr(t1 + 1, t2 - t1 - 1));
        cur.pred.push_back(line.substr(t2 + 1));
    }
    flush();
    if (sentences.empty()) throw std::runtime_error("iob: " + file.string() + " is empty");
    return sentences;
}

void ScoreMatrix::validate() const {
    if (tasks.empty()) throw std::invalid_argument("score matrix: no tasks");
    if (checkpoints.size() != scores.size())
        throw std::invalid_argument("score matrix: row count mismatch");
    std::set<int64_t> steps(checkpoints.begin(), checkpoints.end());
    if (steps.size() != checkpoints.size())
        throw std::invalid_argument("score matrix: duplicate checkpoint steps");
    bool any_complete = false;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].size() != tasks.size())
            throw std::invalid_argument("score matrix: ragged row at checkpoint " +
                                        std::to_string(checkpoints[i]));
        bool complete = true;
        for (const auto& s : scores[i]) {
            if (!s) {
                complete = false;
                continue;
            }
            if (*s < 0.0 || *s > 1.0)
                throw std::invalid_argument("score matrix: score outside [0,1] at checkpoint " +
                                            std::to_string(checkpoints[i]));
        }
        any_complete |= complete;
    }
    if (!any_complete)
        throw std::invalid_argument("score matrix: no checkpoint has a complete task row");
}

ScoreMatrix ScoreMatrix::load_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("score matrix: cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("score matrix: " + file.string() + " is empty");

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        size_t start = 0;
        for (size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ',') {
                out.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        }
        return out;
    };

    ScoreMatrix m;
    auto header = split(line);
    if (header.size() < 2 || header[0] != "checkpoint")
        throw std::runtime_error("score matrix: " + file.string() +
                                 ": header must be 'checkpoint,<task>,...'");
    m.tasks.assign(header.begin() + 1, header.end());

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            throw std::runtime_error("score matrix: " + file.string() + ":" +
                                     std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " cells");
        try {
            m.checkpoints.push_back(std::stoll(cells[0]));
        } catch (const std::exception&) {
            throw std::runtime_error("score matrix: " + file.string() + ":" +
                                     std::to_string(line_no) + ": bad checkpoint step '" +
                                     cells[0] + "'");
        }
        std::vector<std::optional<double>> row;
        for (size_t j = 1; j < cells.size(); ++j) {
            if (cells[j].empty()) {
                row.push_back(std::nullopt);
            } else {
                try {
                    row.push_back(std::stod(cells[j]));
                } catch (const std::exception&) {
                    throw std::runtime_error("score matrix: " + file.string() + ":" +
                                             std::to_string(line_no) + ": bad score '" +
                                             cells[j] + "'");
                }
            }
        }
        m.scores.push_back(std::move(row));
    }
    m.validate();
    return m;
}

std::string_view policy_name(SelectionPolicy p) {
    return p == SelectionPolicy::kMean ? "mean" : "mean_rank";
}

namespace {

const char kSelectionCaveat[] =
    "per-checkpoint comparisons assume comparable fine-tuning conditions; "
    "scores at a single checkpoint may vary with fine-tuning seeds";

std::vector<size_t> complete_rows(const ScoreMatrix& m) {
    std::vector<size_t> rows;
    for (size_t i = 0; i < m.scores.size(); ++i) {
        bool complete = std::all_of(m.scores[i].begin(), m.scores[i].end(),
                                    [](const auto& s) { return s.has_value(); });
        if (complete) rows.push_back(i);
    }
    return rows;
}

// Fractional rank, 1 = best score; equal scores share the average rank.
std::vector<double> ranks_for_task(const ScoreMatrix& m, const std::vector<size_t>& rows,
                                   size_t task) {
    std::vector<double> ranks(rows.size(), 0.0);
    for (size_t a = 0; a < rows.size(); ++a) {
        double better = 0.0, equal = 0.0;
        double sa = *m.scores[rows[a]][task];
        for (size_t b = 0; b < rows.size(); ++b) {
            double sb = *m.scores[rows[b]][task];
            if (sb > sa) ++better;
            if (sb == sa) ++equal;  // includes self
        }
        ranks[a] = better + (equal + 1.0) / 2.0;
    }
    return ranks;
}

}  // namespace

SelectionReport select_checkpoint(const ScoreMatrix& matrix, SelectionPolicy policy) {
    matrix.validate();
    const auto rows = complete_rows(matrix);
    if (rows.empty())
        throw std::runtime_error("select_checkpoint: no checkpoint has a complete task row");

    std::vector<double> value(rows.size(), 0.0);
    if (policy == SelectionPolicy::kMean) {
        for (size_t a = 0; a < rows.size(); ++a) {
            double sum = 0.0;
            for (size_t j = 0; j < matrix.tasks.size(); ++j) sum += *matrix.scores[rows[a]][j];
            value[a] = sum / static_cast<double>(matrix.tasks.size());
        }
    } else {
        std::vector<double> rank_sum(rows.size(), 0.0);
        for (size_t j = 0; j < matrix.tasks.size(); ++j) {
            auto ranks = ranks_for_task(matrix, rows, j);
            for (size_t a = 0; a < rows.size(); ++a) rank_sum[a] += ranks[a];
        }
        for (size_t a = 0; a < rows.size(); ++a)
            value[a] = rank_sum[a] / static_cast<double>(matrix.tasks.size());
    }

    // Ties break toward the earlier checkpoint: strict comparison keeps the
    // first best row.
    size_t best = 0;
    for (size_t a = 1; a < rows.size(); ++a) {
        bool better = policy == SelectionPolicy::kMean ? value[a] > value[best]
                                                       : value[a] < value[best];
        if (better) best = a;
    }

    SelectionReport report;
    report.policy = policy;
    report.selected = matrix.checkpoints[rows[best]];
    report.selected_value = value[best];
    report.caveat = kSelectionCaveat;
    for (size_t j = 0; j < matrix.tasks.size(); ++j) {
        TaskSummary summary;
        summary.task = matrix.tasks[j];
        double lo = 2.0, hi = -1.0;
        bool have_best = false;
        for (size_t i = 0; i < matrix.scores.size(); ++i) {
            const auto& s = matrix.scores[i][j];
            if (!s) continue;
            lo = std::min(lo, *s);
            hi = std::max(hi, *s);
            if (!have_best || *s > summary.best_score) {
                summary.best_score = *s;
                summary.best_checkpoint = matrix.checkpoints[i];
                have_best = true;
            }
        }
        summary.fluctuation = have_best ? hi - lo : 0.0;
        report.tasks.push_back(std::move(summary));
    }
    return report;
}

std::string SelectionReport::to_text() const {
    std::ostringstream out;
    out << "policy: " << policy_name(policy) << '\n';
    out << "selected checkpoint: " << selected;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", selected_value);
    out << (policy == SelectionPolicy::kMean ? " (mean score " : " (mean rank ") << buf << ")\n";
    for (const auto& t : tasks) {
        std::snprintf(buf, sizeof(buf), "%.4f", t.best_score);
        out << "task " << t.task << ": best " << buf << " at checkpoint " << t.best_checkpoint;
        std::snprintf(buf, sizeof(buf), "%.4f", t.fluctuation);
        out << ", fluctuation " << buf << '\n';
    }
    out << "note: " << caveat << '\n';
    return out.str();
}

std::string SelectionReport::to_json() const {
    nlohmann::json j{{"policy", std::string(policy_name(policy))},
                     {"selected_checkpoint", selected},
                     {"selected_value", selected_value},
                     {"caveat", caveat}};
    j["tasks"] = nlohmann::json::array();
    for (const auto& t : tasks)
        j["tasks"].push_back({{"task", t.task},
                              {"best_checkpoint", t.best_checkpoint},
                              {"best_score", t.best_score},
                              {"fluctuation", t.fluctuation}});
    return j.dump(2);
}

ComparisonTable tabulate(const std::vector<ModelScores>& models, SelectionPolicy policy) {
    ComparisonTable table;
    for (const auto& m : models)
        for (const auto& task : m.matrix.tasks)
            if (std::find(table.tasks.begin(), table.tasks.end(), task) == table.tasks.end())
                table.tasks.push_back(task);

    for (const auto& m : models) {
        SelectionReport sel = select_checkpoint(m.matrix, policy);
        size_t row_idx = 0;
        for (size_t i = 0; i < m.matrix.checkpoints.size(); ++i)
            if (m.matrix.checkpoints[i] == sel.selected) row_idx = i;
        ComparisonTable::Row row;
        row.model = m.model;
        row.checkpoint = sel.selected;
        row.scores.assign(table.tasks.size(), std::nullopt);
        for (size_t j = 0; j < table.tasks.size(); ++j) {
            auto it = std::find(m.matrix.tasks.begin(), m.matrix.tasks.end(), table.tasks[j]);
            if (it == m.matrix.tasks.end()) continue;
            row.scores[j] = m.matrix.scores[row_idx][static_cast<size_t>(
                it - m.matrix.tasks.begin())];
        }
        table.rows.push_back(std::move(row));
    }

    table.best.assign(table.rows.size(), std::vector<bool>(table.tasks.size(), false));
    for (size_t j = 0; j < table.tasks.size(); ++j) {
        double hi = -1.0;
        for (const auto& row : table.rows)
            if (row.scores[j]) hi = std::max(hi, *row.scores[j]);
        if (hi < 0.0) continue;
        for (size_t i = 0; i < table.rows.size(); ++i)
            if (table.rows[i].scores[j] && *table.rows[i].scores[j] == hi)
                table.best[i][j] = true;
    }
    return table;
}

std::string ComparisonTable::to_text() const {
    auto cell = [&](size_t i, size_t j) {
        if (!rows[i].scores[j]) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", *rows[i].scores[j] * 100.0);
        return (best[i][j] ? "*" : "") + std::string(buf);
    };

    size_t model_width = 5;  // "model"
    for (const auto& row : rows) model_width = std::max(model_width, row.model.size());
    std::vector<size_t> widths(tasks.size());
    for (size_t j = 0; j < tasks.size(); ++j) {
        widths[j] = tasks[j].size();
        for (size_t i = 0; i < rows.size(); ++i) widths[j] = std::max(widths[j], cell(i, j).size());
    }

    std::ostringstream out;
    out << std::string(model_width - 5, ' ') << "model";
    for (size_t j = 0; j < tasks.size(); ++j)
        out << "  " << std::string(widths[j] - tasks[j].size(), ' ') << tasks[j];
    out << '\n';
    for (size_t i = 0; i < rows.size(); ++i) {
        out << std::string(model_width - rows[i].model.size(), ' ') << rows[i].model;
        for (size_t j = 0; j < tasks.size(); ++j) {
            std::string c = cell(i, j);
            out << "  " << std::string(widths[j] - c.size(), ' ') << c;
        }
        out << '\n';
    }
    return out.str();
}

std::string ComparisonTable::to_json() const {
    nlohmann::json j;
    j["tasks"] = tasks;
    j["rows"] = nlohmann::json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
        nlohmann::json scores = nlohmann::json::object();
        for (size_t t = 0; t < tasks.size(); ++t)
            if (rows[i].scores[t]) scores[tasks[t]] = *rows[i].scores[t];
        j["rows"].push_back({{"model", rows[i].model},
                             {"checkpoint", rows[i].checkpoint},
                             {"scores", scores}});
    }
    nlohmann::json bests = nlohmann::json::object();
    for (size_t t = 0; t < tasks.size(); ++t) {
        nlohmann::json names = nlohmann::json::array();
        for (size_t i = 0; i < rows.size(); ++i)
            if (best[i][t]) names.push_back(rows[i].model);
        bests[tasks[t]] = names;
    }
    j["best"] = bests;
    return j.dump(2);
}

}  // namespace arprep::eval
