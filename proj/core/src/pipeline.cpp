// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "arprep/hash128.hpp"
#include "arprep/text_norm.hpp"
#include "json.hpp"

namespace arprep::pipeline {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Ordered batch-parallel line transform; output order equals input order
// regardless of worker count.
uint64_t transform_lines(const fs::path& in_path, const fs::path& out_path, unsigned workers,
                         const std::function<std::string(const std::string&)>& fn) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + in_path.string());
    std::ofstream out(out_path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path.string());

    constexpr size_t kBatch = 8192;
    std::vector<std::string> lines;
    lines.reserve(kBatch);
    uint64_t count = 0;
    std::string line;
    bool more = true;
    while (more) {
        lines.clear();
        while (lines.size() < kBatch && (more = static_cast<bool>(std::getline(in, line))))
            lines.push_back(line);
        if (lines.empty()) break;
        std::vector<std::string> results(lines.size());
        unsigned n = std::max(1u, workers);
        if (n == 1 || lines.size() < 64) {
            for (size_t i = 0; i < lines.size(); ++i) results[i] = fn(lines[i]);
        } else {
            std::vector<std::thread> threads;
            std::vector<std::exception_ptr> errors(n);
            size_t chunk = (lines.size() + n - 1) / n;
            for (unsigned t = 0; t < n; ++t) {
                size_t b = std::min(lines.size(), t * chunk);
                size_t e = std::min(lines.size(), b + chunk);
                if (b >= e) break;
                threads.emplace_back([&, t, b, e] {
                    try {
                        for (size_t i = b; i < e; ++i) results[i] = fn(lines[i]);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& th : threads) th.join();
            for (auto& err : errors)
                if (err) std::rethrow_exception(err);
        }
        for (auto& r : results) {
            out << r << '\n';
            ++count;
        }
        if (!out) throw std::runtime_error("write failed: " + out_path.string());
    }
    return count;
}

uint64_t count_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    uint64_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

struct StageRunner {
    const PipelineConfig& cfg;
    fs::path data_dir;
    fs::path meta_dir;
    std::string cfg_hash;
    RunReport* report;

    fs::path marker_path(const std::string& stage) const {
        return meta_dir / (stage + ".done");
    }

    bool is_done(const std::string& stage) const {
        std::ifstream in(marker_path(stage));
        if (!in) return false;
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) return false;
        if (j.value("config_hash", "") != cfg_hash)
            throw std::runtime_error("stage " + stage + ": completion marker was written by a " +
                                     "different configuration; clean " + meta_dir.string() +
                                     " to rerun from scratch");
        return true;
    }

    void mark_done(const std::string& stage, uint64_t in, uint64_t out) const {
        nlohmann::json j{{"stage", stage},
                         {"config_hash", cfg_hash},
                         {"records_in", in},
                         {"records_out", out}};
        std::ofstream f(marker_path(stage), std::ios::trunc);
        f << j.dump() << '\n';
    }

    // fn returns {records_in, records_out}.
    void run(const std::string& stage,
             const std::function<std::pair<uint64_t, uint64_t>()>& fn) {
        StageReport sr;
        sr.stage = stage;
        if (is_done(stage)) {
            sr.skipped = true;
            std::ifstream in(marker_path(stage));
            nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
            if (!j.is_discarded()) {
                sr.records_in = j.value("records_in", uint64_t{0});
                sr.records_out = j.value("records_out", uint64_t{0});
            }
            report->stages.push_back(sr);
            return;
        }
        auto start = Clock::now();
        std::pair<uint64_t, uint64_t> counts;
        try {
            counts = fn();
        } catch (const std::exception& e) {
            throw std::runtime_error("stage " + stage + " failed: " + e.what());
        }
        sr.records_in = counts.first;
        sr.records_out = counts.second;
        sr.wall_ms = ms_since(start);
        mark_done(stage, counts.first, counts.second);
        report->stages.push_back(sr);
    }
};

// Final artifacts appear atomically.
void commit(const fs::path& tmp, const fs::path& final_path) {
    fs::rename(tmp, final_path);
}

std::string transform_record_text(const std::string& line,
                                  const std::function<std::string(const std::string&)>& text_fn) {
    TextRecord rec = parse_record_line(line, RecordFormat::kJsonl, 0, Genre::kTweet, "");
    rec.text = text_fn(rec.text);
    return serialize_record(rec, RecordFormat::kJsonl);
}

}  // namespace

PipelineConfig PipelineConfig::from_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("config: cannot open " + file.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("config: " + file.string() + " is not JSON");

    PipelineConfig cfg;
    if (!j.contains("inputs") || !j["inputs"].is_array() || j["inputs"].empty())
        throw std::runtime_error("config: 'inputs' must be a non-empty array");
    for (const auto& item : j["inputs"]) {
        InputSpec spec;
        spec.path = item.at("path").get<std::string>();
        auto fmt = record_format_from_name(item.value("format", "raw"));
        if (!fmt) throw std::runtime_error("config: input format must be raw|jsonl");
        spec.format = *fmt;
        auto genre = genre_from_name(item.value("genre", "tweet"));
        if (!genre) throw std::runtime_error("config: input genre must be tweet|formal");
        spec.genre = *genre;
        spec.source = item.value("source", std::string("input"));
        cfg.inputs.push_back(std::move(spec));
    }
    cfg.out_dir = j.value("out_dir", std::string());
    cfg.seed = j.value("seed", uint64_t{1});
    cfg.workers = j.value("workers", 1u);

    if (j.contains("mix")) {
        const auto& m = j["mix"];
        cfg.mix.enabled = m.value("enabled", true);
        cfg.mix.total_lines = m.value("total_lines", uint64_t{0});
        if (m.contains("proportions"))
            for (const auto& [k, v] : m["proportions"].items())
                cfg.mix.proportions[k] = v.get<double>();
    }
    if (j.contains("stages")) {
        const auto& s = j["stages"];
        cfg.do_normalize = s.value("normalize", true);
        cfg.do_dedup = s.value("dedup", true);
        cfg.do_segment = s.value("segment", true);
        cfg.do_bpe = s.value("bpe", true);
        cfg.do_mlm = s.value("mlm", true);
    }
    if (j.contains("normalize")) cfg.farsi_map = j["normalize"].value("farsi_map", std::string());
    if (j.contains("dedup")) {
        const auto& d = j["dedup"];
        cfg.dedup_partitions = d.value("partitions", 1u);
        cfg.dedup_spill = d.value("spill", false);
        cfg.dedup_hash_seed = d.value("hash_seed", dedup::kDefaultHashSeed);
        int bits = d.value("hash_bits", 128);
        if (bits != 64 && bits != 128)
            throw std::runtime_error("config: dedup.hash_bits must be 64 or 128");
        cfg.dedup_width = bits == 64 ? dedup::HashWidth::k64 : dedup::HashWidth::k128;
        cfg.dedup_paranoid = d.value("paranoid", false);
        cfg.dedup_all_genres = d.value("all_genres", false);
    }
    if (j.contains("segment")) {
        const auto& s = j["segment"];
        cfg.segmenter = s.value("segmenter", std::string("builtin"));
        std::string render = s.value("render", std::string("plus-marks"));
        if (render == "plus-marks") {
            cfg.render = seg::MarkerStyle::kPlusMarks;
        } else if (render == "space-joined") {
            cfg.render = seg::MarkerStyle::kSpaceJoined;
        } else {
            throw std::runtime_error("config: segment.render must be plus-marks|space-joined");
        }
        cfg.affix_table = s.value("affix_table", std::string());
        cfg.segment_timeout_ms = s.value("timeout_ms", 30000);
    }
    if (j.contains("bpe")) {
        const auto& b = j["bpe"];
        cfg.bpe_train.target_vocab = b.value("target_vocab", 64000);
        cfg.bpe_train.min_frequency = b.value("min_frequency", int64_t{2});
        cfg.bpe_model_dir = b.value("model_dir", std::string());
    }
    if (j.contains("mlm")) {
        const auto& m = j["mlm"];
        cfg.mlm_params.max_seq_len = m.value("max_seq_len", 128);
        cfg.mlm_params.mask_prob = m.value("mask_prob", 0.15);
        cfg.mlm_params.dup_factor = m.value("dup_factor", 10);
        cfg.mlm_params.whole_word = m.value("whole_word", false);
        cfg.shard_size = m.value("shard_size", uint64_t{100000});
        std::string fmt = m.value("format", std::string("binary"));
        if (fmt == "binary") {
            cfg.shard_format = mlm::ShardFormat::kBinary;
        } else if (fmt == "debug-text") {
            cfg.shard_format = mlm::ShardFormat::kDebugText;
        } else {
            throw std::runtime_error("config: mlm.format must be binary|debug-text");
        }
    }
    return cfg;
}

void PipelineConfig::validate() const {
    if (inputs.empty()) throw std::invalid_argument("config: no inputs");
    for (const auto& spec : inputs)
        if (!fs::exists(spec.path))
            throw std::invalid_argument("config: input path does not exist: " + spec.path);
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir is required");
    if (mix.enabled) {
        double sum = 0.0;
        for (const auto& entry : mix.proportions) sum += entry.second;
        if (mix.proportions.empty() || std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("config: mix proportions must sum to 1");
    }
    if (do_mlm && !do_bpe)
        throw std::invalid_argument("config: the mlm stage requires the bpe stage");
    if (segmenter != "none" && segmenter != "builtin" && segmenter.rfind("external:", 0) != 0)
        throw std::invalid_argument("config: segmenter must be none|builtin|external:<cmd>");
    if (mlm_params.mask_prob < 0.0 || mlm_params.mask_prob > 1.0)
        throw std::invalid_argument("config: mlm.mask_prob must be in [0, 1]");
    if (shard_size == 0) throw std::invalid_argument("config: mlm.shard_size must be >= 1");
    if (dedup_partitions == 0)
        throw std::invalid_argument("config: dedup.partitions must be >= 1");
}

std::string PipelineConfig::config_hash() const {
    // workers excluded: concurrency never shapes artifacts.
    nlohmann::json j;
    j["inputs"] = nlohmann::json::array();
    for (const auto& s : inputs)
        j["inputs"].push_back({{"path", s.path},
                               {"format", s.format == RecordFormat::kRaw ? "raw" : "jsonl"},
                               {"genre", std::string(genre_name(s.genre))},
                               {"source", s.source}});
    j["seed"] = seed;
    j["mix"] = {{"enabled", mix.enabled},
                {"proportions", mix.proportions},
                {"total_lines", mix.total_lines}};
    j["stages"] = {{"normalize", do_normalize},
                   {"dedup", do_dedup},
                   {"segment", do_segment},
                   {"bpe", do_bpe},
                   {"mlm", do_mlm}};
    j["normalize"] = {{"farsi_map", farsi_map}};
    j["dedup"] = {{"partitions", dedup_partitions},
                  {"spill", dedup_spill},
                  {"hash_seed", dedup_hash_seed},
                  {"hash_bits", dedup_width == dedup::HashWidth::k64 ? 64 : 128},
                  {"paranoid", dedup_paranoid},
                  {"all_genres", dedup_all_genres}};
    j["segment"] = {{"segmenter", segmenter},
                    {"render", render == seg::MarkerStyle::kPlusMarks ? "plus-marks"
                                                                      : "space-joined"},
                    {"affix_table", affix_table},
                    {"timeout_ms", segment_timeout_ms}};
    j["bpe"] = {{"target_vocab", bpe_train.target_vocab},
                {"min_frequency", bpe_train.min_frequency},
                {"model_dir", bpe_model_dir}};
    j["mlm"] = {{"max_seq_len", mlm_params.max_seq_len},
                {"mask_prob", mlm_params.mask_prob},
                {"dup_factor", mlm_params.dup_factor},
                {"whole_word", mlm_params.whole_word},
                {"shard_size", shard_size},
                {"format", std::string(mlm::shard_format_name(shard_format))}};
    return murmur3_128(j.dump(), /*seed=*/0).hex();
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages)
        j["stages"].push_back({{"stage", s.stage},
                               {"records_in", s.records_in},
                               {"records_out", s.records_out},
                               {"wall_ms", s.wall_ms},
                               {"skipped", s.skipped}});
    j["final_text_artifact"] = final_text_artifact;
    j["final_stats"] = nlohmann::json::parse(final_stats.to_json());
    return j.dump(2);
}

std::string RunReport::to_text() const {
    std::ostringstream out;
    for (const auto& s : stages) {
        out << "stage " << s.stage << ": in=" << s.records_in << " out=" << s.records_out;
        if (s.skipped) {
            out << " (resumed)";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.1f", s.wall_ms);
            out << " (" << buf << " ms)";
        }
        out << '\n';
    }
    out << "final stats: bytes=" << final_stats.total.bytes
        << " lines=" << final_stats.total.lines << " tokens=" << final_stats.total.tokens
        << " (" << final_text_artifact << ")\n";
    return out.str();
}

RunReport run_pipeline(const PipelineConfig& config) {
    config.validate();

    const fs::path data_dir = config.out_dir / "data";
    const fs::path meta_dir = config.out_dir / "meta";
    fs::create_directories(data_dir);
    fs::create_directories(meta_dir);

    RunReport report;
    StageRunner runner{config, data_dir, meta_dir, config.config_hash(), &report};

    // ingest: tag and merge every input into one jsonl artifact.
    const fs::path ingest_path = data_dir / "00-ingest.jsonl";
    runner.run("ingest", [&]() -> std::pair<uint64_t, uint64_t> {
        const fs::path tmp = ingest_path.string() + ".tmp";
        uint64_t n = 0;
        {
            std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + tmp.string());
            RecordWriter writer(out, RecordFormat::kJsonl);
            for (size_t k = 0; k < config.inputs.size(); ++k) {
                const auto& spec = config.inputs[k];
                std::ifstream in(spec.path, std::ios::binary);
                if (!in) throw std::runtime_error("cannot open " + spec.path);
                RecordReader reader(in, spec.format, spec.genre, spec.source);
                TextRecord rec;
                while (reader.next(rec)) {
                    rec.id = std::to_string(k) + ":" + rec.id;
                    writer.write(rec);
                    ++n;
                }
            }
            if (!out) throw std::runtime_error("write failed: " + tmp.string());
        }
        commit(tmp, ingest_path);
        return {n, n};
    });
    fs::path current = ingest_path;

    if (config.mix.enabled) {
        const fs::path mix_path = data_dir / "01-mix.jsonl";
        runner.run("mix", [&]() -> std::pair<uint64_t, uint64_t> {
            const fs::path tmp = mix_path.string() + ".tmp";
            uint64_t in_count = count_lines(current);
            uint64_t out_count = 0;
            {
                std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
                if (!out) throw std::runtime_error("cannot open " + tmp.string());
                RecordWriter writer(out, RecordFormat::kJsonl);
                std::vector<InputSpec> specs{{current.string(), RecordFormat::kJsonl,
                                              Genre::kTweet, "mix"}};
                out_count = sample_mix(specs, config.mix, config.seed, writer);
                if (!out) throw std::runtime_error("write failed: " + tmp.string());
            }
            commit(tmp, mix_path);
            return {in_count, out_count};
        });
        current = mix_path;
    }

    if (config.do_normalize) {
        const fs::path norm_path = data_dir / "02-normalize.jsonl";
        runner.run("normalize", [&]() -> std::pair<uint64_t, uint64_t> {
            const fs::path tmp = norm_path.string() + ".tmp";
            norm::FarsiMap farsi = config.farsi_map.empty()
                                       ? norm::FarsiMap::builtin()
                                       : norm::FarsiMap::load(config.farsi_map);
            norm::Normalizer normalizer(norm::NormalizationProfile::pretrain(), farsi);
            uint64_t n = transform_lines(current, tmp, config.workers,
                                         [&](const std::string& line) {
                                             return transform_record_text(
                                                 line, [&](const std::string& text) {
                                                     return normalizer.normalize(text);
                                                 });
                                         });
            commit(tmp, norm_path);
            return {n, n};
        });
        current = norm_path;
    }

    if (config.do_dedup) {
        const fs::path dedup_path = data_dir / "03-dedup.jsonl";
        runner.run("dedup", [&]() -> std::pair<uint64_t, uint64_t> {
            const fs::path tmp = dedup_path.string() + ".tmp";
            dedup::DedupOptions opts;
            opts.partitions = config.dedup_partitions;
            if (config.dedup_spill) opts.spill_dir = meta_dir / "spill";
            opts.hash_seed = config.dedup_hash_seed;
            opts.width = config.dedup_width;
            opts.paranoid = config.dedup_paranoid;
            opts.all_genres = config.dedup_all_genres;

            std::ifstream in(current, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open " + current.string());
            RecordReader reader(in, RecordFormat::kJsonl);
            dedup::DedupStats stats;
            {
                std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
                if (!out) throw std::runtime_error("cannot open " + tmp.string());
                RecordWriter writer(out, RecordFormat::kJsonl);
                stats = dedup::dedup_stream(reader, opts,
                                            [&](const TextRecord& r) { writer.write(r); });
                if (!out) throw std::runtime_error("write failed: " + tmp.string());
            }
            commit(tmp, dedup_path);
            return {stats.input, stats.unique};
        });
        current = dedup_path;
    }

    if (config.do_segment && config.segmenter != "none") {
        const fs::path seg_path = data_dir / "04-segment.jsonl";
        runner.run("segment", [&]() -> std::pair<uint64_t, uint64_t> {
            const fs::path tmp = seg_path.string() + ".tmp";
            uint64_t n = 0;
            if (config.segmenter == "builtin") {
                seg::AffixTable table = config.affix_table.empty()
                                            ? seg::AffixTable::builtin()
                                            : seg::AffixTable::load(config.affix_table);
                seg::Segmenter segmenter(table);
                n = transform_lines(current, tmp, config.workers, [&](const std::string& line) {
                    return transform_record_text(line, [&](const std::string& text) {
                        return segmenter.line(text, config.render);
                    });
                });
            } else {
                const std::string cmd = config.segmenter.substr(std::string("external:").size());
                // The child speaks plain text: feed the text fields, then pair
                // its output lines with a second pass over the records.
                const fs::path text_tmp = meta_dir / "segment-input.txt";
                {
                    std::ofstream out(text_tmp, std::ios::trunc | std::ios::binary);
                    std::ifstream in(current, std::ios::binary);
                    if (!in) throw std::runtime_error("cannot open " + current.string());
                    RecordReader reader(in, RecordFormat::kJsonl);
                    TextRecord rec;
                    while (reader.next(rec)) out << rec.text << '\n';
                    if (!out) throw std::runtime_error("write failed: " + text_tmp.string());
                }
                std::ifstream text_in(text_tmp, std::ios::binary);
                std::ifstream rec_in(current, std::ios::binary);
                if (!rec_in) throw std::runtime_error("cannot open " + current.string());
                RecordReader reader(rec_in, RecordFormat::kJsonl);
                std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
                if (!out) throw std::runtime_error("cannot open " + tmp.string());
                RecordWriter writer(out, RecordFormat::kJsonl);
                n = seg::segment_via_external(
                    text_in, cmd,
                    [&](std::string_view segmented) {
                        TextRecord rec;
                        if (!reader.next(rec))
                            throw std::runtime_error("external segmenter emitted extra lines");
                        rec.text = std::string(segmented);
                        writer.write(rec);
                    },
                    config.segment_timeout_ms);
                if (!out) throw std::runtime_error("write failed: " + tmp.string());
                std::error_code ec;
                fs::remove(text_tmp, ec);
            }
            commit(tmp, seg_path);
            return {n, n};
        });
        current = seg_path;
    }

    const fs::path bpe_dir = data_dir / "05-bpe";
    const fs::path encoded_path = bpe_dir / "encoded.ids";
    if (config.do_bpe) {
        fs::create_directories(bpe_dir);
        if (config.bpe_model_dir.empty()) {
            runner.run("bpe-train", [&]() -> std::pair<uint64_t, uint64_t> {
                std::ifstream in(current, std::ios::binary);
                if (!in) throw std::runtime_error("cannot open " + current.string());
                RecordReader reader(in, RecordFormat::kJsonl);
                std::vector<std::string> lines;
                TextRecord rec;
                while (reader.next(rec)) lines.push_back(rec.text);
                bpe::BpeTrainConfig train_cfg = config.bpe_train;
                train_cfg.workers = config.workers;
                bpe::BpeModel model = bpe::BpeModel::train(lines, train_cfg);
                model.save(bpe_dir);
                return {lines.size(), static_cast<uint64_t>(model.vocab_size())};
            });
        }
        runner.run("bpe-encode", [&]() -> std::pair<uint64_t, uint64_t> {
            const fs::path tmp = encoded_path.string() + ".tmp";
            const fs::path model_dir =
                config.bpe_model_dir.empty() ? bpe_dir : fs::path(config.bpe_model_dir);
            bpe::BpeModel model = bpe::BpeModel::load(model_dir);
            uint64_t n = transform_lines(current, tmp, config.workers,
                                         [&](const std::string& line) {
                                             TextRecord rec = parse_record_line(
                                                 line, RecordFormat::kJsonl, 0, Genre::kTweet,
                                                 "");
                                             bpe::TokenSequence seq = model.encode(rec.text);
                                             std::string out;
                                             for (size_t i = 0; i < seq.ids.size(); ++i) {
                                                 if (i) out.push_back(' ');
                                                 out += std::to_string(seq.ids[i]);
                                             }
                                             return out;
                                         });
            commit(tmp, encoded_path);
            return {n, n};
        });
    }

    if (config.do_mlm) {
        const fs::path shards_dir = data_dir / "06-shards";
        runner.run("mlm", [&]() -> std::pair<uint64_t, uint64_t> {
            const fs::path model_dir =
                config.bpe_model_dir.empty() ? bpe_dir : fs::path(config.bpe_model_dir);
            bpe::BpeModel model = bpe::BpeModel::load(model_dir);

            mlm::MlmParams params = config.mlm_params;
            // One encoded input shard; workers would each own
            // mix_seed(seed, shard_index) the same way.
            params.seed = mix_seed(config.seed, 0);

            mlm::MlmParams defaults;
            std::vector<std::string> assumed;
            if (params.max_seq_len == defaults.max_seq_len) assumed.push_back("max_seq_len");
            if (params.dup_factor == defaults.dup_factor) assumed.push_back("dup_factor");

            mlm::InstanceGenerator gen(params, model.vocab_size());
            mlm::ShardWriter writer(shards_dir, config.shard_size, config.shard_format, params,
                                    assumed);
            std::ifstream in(encoded_path, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open " + encoded_path.string());
            std::string line;
            uint64_t seqs = 0;
            std::vector<mlm::MlmInstance> batch;
            while (std::getline(in, line)) {
                ++seqs;
                bpe::TokenSequence seq;
                size_t i = 0;
                while (i < line.size()) {
                    while (i < line.size() && line[i] == ' ') ++i;
                    size_t start = i;
                    while (i < line.size() && line[i] != ' ') ++i;
                    if (i > start)
                        seq.ids.push_back(
                            static_cast<int32_t>(std::stol(line.substr(start, i - start))));
                }
                seq.is_continuation.resize(seq.ids.size());
                for (size_t k = 0; k < seq.ids.size(); ++k)
                    seq.is_continuation[k] = k > 0 && !model.ends_word(seq.ids[k - 1]);
                batch.clear();
                gen.generate(seq, batch);
                for (const auto& inst : batch) writer.add(inst);
            }
            mlm::ShardManifest manifest = writer.finish();
            return {seqs, manifest.total_instances};
        });
    }

    // stats always runs over the last text artifact.
    runner.run("stats", [&]() -> std::pair<uint64_t, uint64_t> {
        report.final_stats = compute_stats_file(current, RecordFormat::kJsonl,
                                                TokenizerKind::kWhitespace);
        report.final_text_artifact = current.string();
        return {report.final_stats.total.lines, report.final_stats.total.lines};
    });
    if (report.final_text_artifact.empty()) {
        // stats stage was resumed; recompute for the report.
        report.final_stats = compute_stats_file(current, RecordFormat::kJsonl,
                                                TokenizerKind::kWhitespace);
        report.final_text_artifact = current.string();
    }

    std::ofstream rep(meta_dir / "run-report.json", std::ios::trunc);
    rep << report.to_json() << '\n';
    return report;
}

}  // namespace arprep::pipeline
