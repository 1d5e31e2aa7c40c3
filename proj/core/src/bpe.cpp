// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "arprep/unicode.hpp"

namespace arprep::bpe {

namespace uni = arprep::uni;
namespace fs = std::filesystem;

const std::array<std::string_view, kNumSpecials>& special_literals() {
    static const std::array<std::string_view, kNumSpecials> lits = {
        "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "@USERNAME", "URL", "NUM"};
    return lits;
}

namespace {

bool is_special_literal(std::string_view word, int32_t& id) {
    const auto& lits = special_literals();
    for (int32_t i = kMention; i <= kNum; ++i) {
        if (word == lits[static_cast<size_t>(i)]) {
            id = i;
            return true;
        }
    }
    return false;
}

template <class Fn>
void for_each_word(std::string_view line, Fn&& fn) {
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) fn(line.substr(start, i - start));
    }
}

// Trainer-internal interned symbol: raw text plus word-final flag. The
// serialized form appends kWordMarker to final symbols; keeping the flag
// out-of-band means input text containing a literal "</w>" cannot alias it.
struct Sym {
    std::string text;
    bool final = false;
};

class SymbolTable {
public:
    int32_t intern(std::string text, bool final) {
        std::string key = text + (final ? "\x01" : "\x02");
        auto [it, inserted] = index_.emplace(std::move(key), static_cast<int32_t>(syms_.size()));
        if (inserted) {
            syms_.push_back(Sym{std::move(text), final});
            displays_.push_back(syms_.back().text + (final ? std::string(kWordMarker) : ""));
        }
        return it->second;
    }

    const Sym& sym(int32_t id) const { return syms_[static_cast<size_t>(id)]; }
    const std::string& display(int32_t id) const { return displays_[static_cast<size_t>(id)]; }
    size_t size() const { return syms_.size(); }

private:
    std::vector<Sym> syms_;
    std::vector<std::string> displays_;
    std::unordered_map<std::string, int32_t> index_;
};

struct Word {
    std::vector<int32_t> syms;
    int64_t count = 0;
};

uint64_t pair_key(int32_t a, int32_t b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(b);
}

class Trainer {
public:
    Trainer(const BpeTrainConfig& cfg) : cfg_(cfg) {}

    void add_counts(const std::unordered_map<std::string, int64_t>& word_counts) {
        for (const auto& [w, c] : word_counts) counts_[w] += c;
    }

    // Ordered merges plus the finished vocabulary.
    void run(std::vector<std::pair<std::string, std::string>>& merges,
             std::vector<std::string>& vocab, std::vector<bool>& word_final) {
        if (counts_.empty()) throw std::runtime_error("bpe train: empty corpus");
        build_words();

        // Floor: specials plus every distinct character symbol.
        std::set<int32_t> alphabet;
        for (const auto& w : words_)
            for (int32_t s : w.syms) alphabet.insert(s);
        const int64_t floor = kNumSpecials + static_cast<int64_t>(alphabet.size());
        if (cfg_.target_vocab <= floor)
            throw std::runtime_error(
                "bpe train: target_vocab " + std::to_string(cfg_.target_vocab) +
                " must exceed the character-alphabet floor of " + std::to_string(floor) + " (" +
                std::to_string(kNumSpecials) + " specials + " +
                std::to_string(alphabet.size()) + " characters)");

        count_all_pairs();

        std::unordered_set<std::string> vocab_set;
        int64_t vocab_count = floor;
        while (!selection_.empty()) {
            const SelEntry top = *selection_.begin();
            if (top.count < cfg_.min_frequency) break;
            int32_t merged = merged_symbol(top.left, top.right);
            const std::string& display = table_.display(merged);
            bool fresh = !vocab_set.count(display) && !alphabet.count(merged);
            if (fresh && vocab_count >= cfg_.target_vocab) break;
            if (fresh) {
                vocab_set.insert(display);
                ++vocab_count;
                merge_new_symbols_.push_back(merged);
            }
            merges.emplace_back(table_.display(top.left), table_.display(top.right));
            apply_merge(top.left, top.right, merged);
        }

        // Vocabulary: specials, character alphabet in byte order, then merge
        // products in learned order. Ids are dense by construction.
        for (auto lit : special_literals()) {
            vocab.emplace_back(lit);
            word_final.push_back(true);
        }
        std::vector<std::string> alpha_displays;
        for (int32_t s : alphabet) alpha_displays.push_back(table_.display(s));
        std::sort(alpha_displays.begin(), alpha_displays.end());
        for (auto& d : alpha_displays) {
            word_final.push_back(ends_with_marker(d));
            vocab.push_back(std::move(d));
        }
        for (int32_t s : merge_new_symbols_) {
            vocab.push_back(table_.display(s));
            word_final.push_back(table_.sym(s).final);
        }
    }

    static bool ends_with_marker(std::string_view display) {
        return display.size() >= kWordMarker.size() &&
               display.substr(display.size() - kWordMarker.size()) == kWordMarker;
    }

private:
    struct SelEntry {
        int64_t count;
        int32_t left;
        int32_t right;
    };
    struct SelCmp {
        const SymbolTable* table;
        bool operator()(const SelEntry& a, const SelEntry& b) const {
            if (a.count != b.count) return a.count > b.count;
            if (int c = table->display(a.left).compare(table->display(b.left)); c != 0)
                return c < 0;
            return table->display(a.right) < table->display(b.right);
        }
    };

    void build_words() {
        // Deterministic word order: sort raw words. Selection does not depend
        // on it, but spill-free reproducibility is easier to reason about.
        std::map<std::string, int64_t> sorted(counts_.begin(), counts_.end());
        counts_.clear();
        words_.reserve(sorted.size());
        for (const auto& [raw, count] : sorted) {
            Word w;
            w.count = count;
            std::u32string cps = uni::decode_utf8(raw);
            for (size_t i = 0; i < cps.size(); ++i) {
                std::string ch;
                uni::append_utf8(ch, cps[i]);
                w.syms.push_back(table_.intern(std::move(ch), i + 1 == cps.size()));
            }
            words_.push_back(std::move(w));
        }
    }

    void count_all_pairs() {
        selection_ = std::set<SelEntry, SelCmp>(SelCmp{&table_});
        for (size_t wi = 0; wi < words_.size(); ++wi) {
            const Word& w = words_[wi];
            for (size_t i = 0; i + 1 < w.syms.size(); ++i) {
                uint64_t key = pair_key(w.syms[i], w.syms[i + 1]);
                pair_counts_[key] += w.count;
                pair_words_[key].insert(static_cast<int32_t>(wi));
            }
        }
        for (const auto& [key, count] : pair_counts_)
            selection_.insert({count, static_cast<int32_t>(key >> 32),
                               static_cast<int32_t>(key & 0xFFFFFFFF)});
    }

    int32_t merged_symbol(int32_t l, int32_t r) {
        const Sym& a = table_.sym(l);
        const Sym& b = table_.sym(r);
        return table_.intern(a.text + b.text, b.final);
    }

    void bump(int32_t l, int32_t r, int64_t delta, int32_t wid) {
        uint64_t key = pair_key(l, r);
        auto it = pair_counts_.find(key);
        int64_t before = it == pair_counts_.end() ? 0 : it->second;
        int64_t after = before + delta;
        if (before > 0) selection_.erase({before, l, r});
        if (after > 0) {
            selection_.insert({after, l, r});
            pair_counts_[key] = after;
        } else {
            if (it != pair_counts_.end()) pair_counts_.erase(it);
            pair_words_.erase(key);
        }
        if (delta > 0 && after > 0) pair_words_[key].insert(wid);
    }

    void apply_merge(int32_t l, int32_t r, int32_t merged) {
        uint64_t key = pair_key(l, r);
        auto wit = pair_words_.find(key);
        if (wit == pair_words_.end()) return;
        std::vector<int32_t> word_ids(wit->second.begin(), wit->second.end());

        for (int32_t wid : word_ids) {
            Word& w = words_[static_cast<size_t>(wid)];
            bool contains = false;
            for (size_t i = 0; i + 1 < w.syms.size(); ++i)
                if (w.syms[i] == l && w.syms[i + 1] == r) contains = true;
            if (!contains) continue;  // stale index entry

            for (size_t i = 0; i + 1 < w.syms.size(); ++i)
                bump(w.syms[i], w.syms[i + 1], -w.count, wid);

            std::vector<int32_t> out;
            out.reserve(w.syms.size());
            for (size_t i = 0; i < w.syms.size();) {
                if (i + 1 < w.syms.size() && w.syms[i] == l && w.syms[i + 1] == r) {
                    out.push_back(merged);
                    i += 2;
                } else {
                    out.push_back(w.syms[i]);
                    ++i;
                }
            }
            w.syms = std::move(out);

            for (size_t i = 0; i + 1 < w.syms.size(); ++i)
                bump(w.syms[i], w.syms[i + 1], w.count, wid);
        }
    }

    BpeTrainConfig cfg_;
    std::unordered_map<std::string, int64_t> counts_;
    SymbolTable table_;
    std::vector<Word> words_;
    std::unordered_map<uint64_t, int64_t> pair_counts_;
    std::unordered_map<uint64_t, std::unordered_set<int32_t>> pair_words_;
    std::set<SelEntry, SelCmp> selection_{SelCmp{nullptr}};
    std::vector<int32_t> merge_new_symbols_;
};

std::unordered_map<std::string, int64_t> count_words_chunk(const std::vector<std::string>& lines,
                                                           size_t begin, size_t end) {
    std::unordered_map<std::string, int64_t> counts;
    for (size_t i = begin; i < end; ++i)
        for_each_word(lines[i], [&](std::string_view w) { ++counts[std::string(w)]; });
    return counts;
}

}  // namespace

BpeModel BpeModel::train(const std::vector<std::string>& lines, const BpeTrainConfig& cfg) {
    Trainer trainer(cfg);
    unsigned workers = std::max(1u, cfg.workers);
    if (workers == 1 || lines.size() < 1024) {
        trainer.add_counts(count_words_chunk(lines, 0, lines.size()));
    } else {
        // Chunk counts merge deterministically: integer sums commute.
        std::vector<std::unordered_map<std::string, int64_t>> parts(workers);
        std::vector<std::thread> threads;
        size_t chunk = (lines.size() + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t) {
            size_t b = std::min(lines.size(), t * chunk);
            size_t e = std::min(lines.size(), b + chunk);
            threads.emplace_back([&, t, b, e] { parts[t] = count_words_chunk(lines, b, e); });
        }
        for (auto& th : threads) th.join();
        for (auto& p : parts) trainer.add_counts(p);
    }

    BpeModel model;
    trainer.run(model.merges_, model.vocab_, model.word_final_);
    model.index_vocab();
    model.build_ranks();
    return model;
}

BpeModel BpeModel::train(std::istream& corpus, const BpeTrainConfig& cfg) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(corpus, line)) lines.push_back(line);
    return train(lines, cfg);
}

void BpeModel::index_vocab() {
    vocab_index_.clear();
    for (size_t i = 0; i < vocab_.size(); ++i)
        vocab_index_.emplace(vocab_[i], static_cast<int32_t>(i));
    if (vocab_index_.size() != vocab_.size())
        throw std::runtime_error("bpe: duplicate token in vocabulary");
}

void BpeModel::build_ranks() {
    merge_rank_.clear();
    for (size_t i = 0; i < merges_.size(); ++i)
        merge_rank_.emplace(merges_[i].first + " " + merges_[i].second,
                            static_cast<int32_t>(i));
}

int32_t BpeModel::id_of(std::string_view token) const {
    auto it = vocab_index_.find(std::string(token));
    return it == vocab_index_.end() ? -1 : it->second;
}

std::vector<int32_t> BpeModel::encode_word(std::string_view word) const {
    // Work on serialized symbols; the marker cannot alias input text because
    // it is appended after the split into single codepoints.
    std::u32string cps = uni::decode_utf8(word);
    std::vector<std::string> syms;
    syms.reserve(cps.size());
    for (size_t i = 0; i < cps.size(); ++i) {
        std::string s;
        uni::append_utf8(s, cps[i]);
        if (i + 1 == cps.size()) s += kWordMarker;
        syms.push_back(std::move(s));
    }

    while (syms.size() > 1) {
        int32_t best_rank = -1;
        size_t best_at = 0;
        for (size_t i = 0; i + 1 < syms.size(); ++i) {
            auto it = merge_rank_.find(syms[i] + " " + syms[i + 1]);
            if (it != merge_rank_.end() && (best_rank < 0 || it->second < best_rank)) {
                best_rank = it->second;
                best_at = i;
            }
        }
        if (best_rank < 0) break;
        // Merge every occurrence of the chosen pair, left to right.
        const std::string left = syms[best_at];
        const std::string right = syms[best_at + 1];
        std::vector<std::string> out;
        out.reserve(syms.size());
        for (size_t i = 0; i < syms.size();) {
            if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
                out.push_back(syms[i] + syms[i + 1]);
                i += 2;
            } else {
                out.push_back(std::move(syms[i]));
                ++i;
            }
        }
        syms = std::move(out);
    }

    std::vector<int32_t> ids;
    ids.reserve(syms.size());
    for (const auto& s : syms) {
        int32_t id = id_of(s);
        ids.push_back(id < 0 ? kUnk : id);
    }
    return ids;
}

TokenSequence BpeModel::encode(std::string_view line) const {
    TokenSequence seq;
    for_each_word(line, [&](std::string_view word) {
        int32_t special;
        if (is_special_literal(word, special)) {
            seq.ids.push_back(special);
            seq.is_continuation.push_back(false);
            return;
        }
        std::vector<int32_t> ids = encode_word(word);
        for (size_t i = 0; i < ids.size(); ++i) {
            seq.ids.push_back(ids[i]);
            seq.is_continuation.push_back(i > 0);
        }
    });
    return seq;
}

std::string BpeModel::decode(const std::vector<int32_t>& ids) const {
    std::string out;
    for (int32_t id : ids) {
        if (id < 0 || id >= vocab_size())
            throw std::out_of_range("bpe decode: id " + std::to_string(id) +
                                    " outside vocabulary");
        bool boundary = ends_word(id);
        if (id == kUnk) {
            out += kUnkGlyph;
        } else if (id < kNumSpecials) {
            out += vocab_[static_cast<size_t>(id)];
        } else {
            const std::string& tok = vocab_[static_cast<size_t>(id)];
            out += boundary ? tok.substr(0, tok.size() - kWordMarker.size()) : tok;
        }
        if (boundary) out.push_back(' ');
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string BpeModel::decode(const TokenSequence& seq) const { return decode(seq.ids); }

void BpeModel::save(const fs::path& dir) const {
    fs::create_directories(dir);
    const fs::path merges_path = dir / "merges.txt";
    const fs::path vocab_path = dir / "vocab.txt";
    {
        std::ofstream out(merges_path, std::ios::trunc | std::ios::binary);
        out << "arprep-bpe-merges v1\n";
        for (const auto& [l, r] : merges_) out << l << ' ' << r << '\n';
        if (!out) throw std::runtime_error("bpe save: write failed: " + merges_path.string());
    }
    {
        std::ofstream out(vocab_path, std::ios::trunc | std::ios::binary);
        out << "arprep-bpe-vocab v1\n";
        for (size_t i = 0; i < vocab_.size(); ++i) out << vocab_[i] << '\t' << i << '\n';
        if (!out) throw std::runtime_error("bpe save: write failed: " + vocab_path.string());
    }
}

BpeModel BpeModel::load(const fs::path& dir) {
    BpeModel model;
    const fs::path merges_path = dir / "merges.txt";
    const fs::path vocab_path = dir / "vocab.txt";

    std::ifstream vin(vocab_path, std::ios::binary);
    if (!vin) throw std::runtime_error("bpe load: cannot open " + vocab_path.string());
    std::string line;
    if (!std::getline(vin, line) || line != "arprep-bpe-vocab v1")
        throw std::runtime_error("bpe load: " + vocab_path.string() +
                                 ": missing 'arprep-bpe-vocab v1' header");
    size_t expect = 0;
    while (std::getline(vin, line)) {
        size_t tab = line.rfind('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("bpe load: " + vocab_path.string() +
                                     ": expected <token>TAB<id>");
        std::string token = line.substr(0, tab);
        size_t id = std::stoull(line.substr(tab + 1));
        if (id != expect)
            throw std::runtime_error("bpe load: " + vocab_path.string() + ": ids not dense at " +
                                     std::to_string(id));
        ++expect;
        model.vocab_.push_back(token);
    }
    if (model.vocab_.size() < kNumSpecials)
        throw std::runtime_error("bpe load: vocabulary smaller than the special prefix");
    for (int32_t i = 0; i < kNumSpecials; ++i)
        if (model.vocab_[static_cast<size_t>(i)] != special_literals()[static_cast<size_t>(i)])
            throw std::runtime_error("bpe load: special token prefix mismatch at id " +
                                     std::to_string(i));
    model.word_final_.resize(model.vocab_.size());
    for (size_t i = 0; i < model.vocab_.size(); ++i)
        model.word_final_[i] =
            i < kNumSpecials || Trainer::ends_with_marker(model.vocab_[i]);

    std::ifstream min(merges_path, std::ios::binary);
    if (!min) throw std::runtime_error("bpe load: cannot open " + merges_path.string());
    if (!std::getline(min, line) || line != "arprep-bpe-merges v1")
        throw std::runtime_error("bpe load: " + merges_path.string() +
                                 ": missing 'arprep-bpe-merges v1' header");
    // Parts must be single characters or products of earlier merges.
    std::unordered_set<std::string> known;
    for (size_t i = kNumSpecials; i < model.vocab_.size(); ++i) {
        const std::string& tok = model.vocab_[i];
        std::string raw = model.word_final_[i]
                              ? tok.substr(0, tok.size() - kWordMarker.size())
                              : tok;
        if (uni::codepoint_count(raw) == 1) known.insert(tok);
    }
    size_t line_no = 1;
    while (std::getline(min, line)) {
        ++line_no;
        size_t sp = line.find(' ');
        if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size())
            throw std::runtime_error("bpe load: " + merges_path.string() + ":" +
                                     std::to_string(line_no) + ": expected '<left> <right>'");
        std::string l = line.substr(0, sp);
        std::string r = line.substr(sp + 1);
        if (!known.count(l) || !known.count(r))
            throw std::runtime_error("bpe load: " + merges_path.string() + ":" +
                                     std::to_string(line_no) +
                                     ": pair references a symbol not yet derivable");
        known.insert(l + r);
        model.merges_.emplace_back(std::move(l), std::move(r));
    }

    model.index_vocab();
    model.build_ranks();
    return model;
}

}  // namespace arprep::bpe
