// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0
//
// arprep: corpus preparation and evaluation bookkeeping for Arabic
// tweet/news pretraining data. Line-oriented throughout; logs go to stderr,
// data to stdout or files.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "arprep/bpe.hpp"
#include "arprep/dedup.hpp"
#include "arprep/evalboard.hpp"
#include "arprep/hash128.hpp"
#include "arprep/mlm.hpp"
#include "arprep/pipeline.hpp"
#include "arprep/record.hpp"
#include "arprep/segment.hpp"
#include "arprep/text_norm.hpp"

namespace {

using namespace arprep;

struct InStream {
    std::ifstream file;
    std::istream& get(const std::string& path) {
        if (path == "-") return std::cin;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open input " + path);
        return file;
    }
};

struct OutStream {
    std::ofstream file;
    std::ostream& get(const std::string& path) {
        if (path == "-") return std::cout;
        file.open(path, std::ios::trunc | std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output " + path);
        return file;
    }
};

RecordFormat parse_format(const std::string& name) {
    auto f = record_format_from_name(name);
    if (!f) throw CLI::ValidationError("--format", "must be raw|jsonl");
    return *f;
}

Genre parse_genre(const std::string& name) {
    auto g = genre_from_name(name);
    if (!g) throw CLI::ValidationError("--genre", "must be tweet|formal");
    return *g;
}

struct CommonIo {
    std::string input = "-";
    std::string output = "-";
    std::string format = "raw";
    std::string genre = "tweet";
    std::string source = "input";

    void attach(CLI::App* cmd) {
        cmd->add_option("-i,--input", input, "input file, - for stdin");
        cmd->add_option("-o,--output", output, "output file, - for stdout");
        cmd->add_option("--format", format, "record format: raw|jsonl")
            ->check(CLI::IsMember({"raw", "jsonl"}));
        cmd->add_option("--genre", genre, "genre tag for raw records")
            ->check(CLI::IsMember({"tweet", "formal"}));
        cmd->add_option("--source", source, "source tag for raw records");
    }
};

int cmd_normalize(const CommonIo& io, const std::string& profile,
                  const std::string& farsi_map) {
    norm::FarsiMap map =
        farsi_map.empty() ? norm::FarsiMap::builtin() : norm::FarsiMap::load(farsi_map);
    norm::Normalizer normalizer(norm::NormalizationProfile::by_name(profile), map);

    InStream is;
    OutStream os;
    RecordFormat fmt = parse_format(io.format);
    RecordReader reader(is.get(io.input), fmt, parse_genre(io.genre), io.source);
    RecordWriter writer(os.get(io.output), fmt);
    TextRecord rec;
    while (reader.next(rec)) {
        rec.text = normalizer.normalize(rec.text);
        writer.write(rec);
    }
    std::cerr << "normalize: " << reader.lines_read() << " records (" << profile << ")\n";
    return 0;
}

int cmd_dedup(const CommonIo& io, const dedup::DedupOptions& opts,
              const std::string& stats_out) {
    InStream is;
    OutStream os;
    RecordFormat fmt = parse_format(io.format);
    RecordReader reader(is.get(io.input), fmt, parse_genre(io.genre), io.source);
    RecordWriter writer(os.get(io.output), fmt);
    dedup::DedupStats stats =
        dedup::dedup_stream(reader, opts, [&](const TextRecord& r) { writer.write(r); });
    std::ostringstream line;
    line << "dedup: in=" << stats.input << " unique=" << stats.unique
         << " duplicates=" << stats.duplicates;
    std::cerr << line.str() << '\n';
    if (!stats_out.empty()) {
        std::ofstream f(stats_out, std::ios::trunc);
        f << "{\"input\": " << stats.input << ", \"unique\": " << stats.unique
          << ", \"duplicates\": " << stats.duplicates << "}\n";
    }
    return 0;
}

int cmd_segment(const CommonIo& io, const std::string& segmenter,
                const std::string& affix_table, const std::string& render_name,
                int timeout_ms) {
    seg::MarkerStyle style = render_name == "space-joined" ? seg::MarkerStyle::kSpaceJoined
                                                           : seg::MarkerStyle::kPlusMarks;
    InStream is;
    OutStream os;
    RecordFormat fmt = parse_format(io.format);
    std::istream& in = is.get(io.input);
    std::ostream& out = os.get(io.output);

    if (segmenter.rfind("external:", 0) == 0) {
        if (fmt != RecordFormat::kRaw)
            throw std::runtime_error("segment: external segmenters take raw text lines");
        uint64_t n = seg::segment_via_external(
            in, segmenter.substr(9), [&](std::string_view line) { out << line << '\n'; },
            timeout_ms);
        std::cerr << "segment: " << n << " lines via external command\n";
        return 0;
    }

    RecordReader reader(in, fmt, parse_genre(io.genre), io.source);
    RecordWriter writer(out, fmt);
    TextRecord rec;
    if (segmenter == "none") {
        while (reader.next(rec)) writer.write(rec);
    } else if (segmenter == "builtin") {
        seg::AffixTable table =
            affix_table.empty() ? seg::AffixTable::builtin() : seg::AffixTable::load(affix_table);
        seg::Segmenter s(table);
        while (reader.next(rec)) {
            rec.text = s.line(rec.text, style);
            writer.write(rec);
        }
    } else {
        throw std::runtime_error("segment: --segmenter must be none|builtin|external:<cmd>");
    }
    std::cerr << "segment: " << reader.lines_read() << " records (" << segmenter << ")\n";
    return 0;
}

int cmd_bpe_train(const CommonIo& io, const std::string& model_dir,
                  const bpe::BpeTrainConfig& cfg) {
    InStream is;
    RecordFormat fmt = parse_format(io.format);
    RecordReader reader(is.get(io.input), fmt, parse_genre(io.genre), io.source);
    std::vector<std::string> lines;
    TextRecord rec;
    while (reader.next(rec)) lines.push_back(rec.text);
    bpe::BpeModel model = bpe::BpeModel::train(lines, cfg);
    model.save(model_dir);
    std::cerr << "bpe-train: vocab " << model.vocab_size() << ", " << model.merge_count()
              << " merges -> " << model_dir << '\n';
    return 0;
}

int cmd_bpe_encode(const CommonIo& io, const std::string& model_dir, bool decode) {
    bpe::BpeModel model = bpe::BpeModel::load(model_dir);
    InStream is;
    OutStream os;
    std::ostream& out = os.get(io.output);
    uint64_t n = 0;

    if (decode) {
        std::istream& in = is.get(io.input);
        std::string line;
        while (std::getline(in, line)) {
            std::vector<int32_t> ids;
            std::istringstream ss(line);
            int32_t id;
            while (ss >> id) ids.push_back(id);
            out << model.decode(ids) << '\n';
            ++n;
        }
        std::cerr << "bpe-encode: decoded " << n << " lines\n";
        return 0;
    }

    RecordFormat fmt = parse_format(io.format);
    RecordReader reader(is.get(io.input), fmt, parse_genre(io.genre), io.source);
    TextRecord rec;
    while (reader.next(rec)) {
        bpe::TokenSequence seq = model.encode(rec.text);
        for (size_t i = 0; i < seq.ids.size(); ++i) {
            if (i) out << ' ';
            out << seq.ids[i];
        }
        out << '\n';
        ++n;
    }
    std::cerr << "bpe-encode: encoded " << n << " lines\n";
    return 0;
}

int cmd_mlm(const std::vector<std::string>& inputs, const std::string& model_dir,
            const std::string& out_dir, mlm::MlmParams params, uint64_t shard_size,
            const std::string& format_name) {
    bpe::BpeModel model = bpe::BpeModel::load(model_dir);
    mlm::ShardFormat format = format_name == "debug-text" ? mlm::ShardFormat::kDebugText
                                                          : mlm::ShardFormat::kBinary;
    mlm::MlmParams defaults;
    std::vector<std::string> assumed;
    if (params.max_seq_len == defaults.max_seq_len) assumed.push_back("max_seq_len");
    if (params.dup_factor == defaults.dup_factor) assumed.push_back("dup_factor");

    const uint64_t global_seed = params.seed;
    mlm::ShardWriter writer(out_dir, shard_size, format, params, assumed);
    uint64_t seqs = 0, instances = 0;
    for (size_t shard_idx = 0; shard_idx < inputs.size(); ++shard_idx) {
        // Every input shard owns a derived seed, so shard outputs do not
        // depend on how many workers or files preceded them.
        mlm::MlmParams shard_params = params;
        shard_params.seed = mix_seed(global_seed, shard_idx);
        mlm::InstanceGenerator gen(shard_params, model.vocab_size());

        std::ifstream in(inputs[shard_idx], std::ios::binary);
        if (!in) throw std::runtime_error("cannot open input " + inputs[shard_idx]);
        std::string line;
        std::vector<mlm::MlmInstance> batch;
        while (std::getline(in, line)) {
            ++seqs;
            bpe::TokenSequence seq;
            std::istringstream ss(line);
            int32_t id;
            while (ss >> id) seq.ids.push_back(id);
            seq.is_continuation.resize(seq.ids.size());
            for (size_t k = 0; k < seq.ids.size(); ++k)
                seq.is_continuation[k] = k > 0 && !model.ends_word(seq.ids[k - 1]);
            batch.clear();
            gen.generate(seq, batch);
            for (const auto& inst : batch) {
                writer.add(inst);
                ++instances;
            }
        }
    }
    mlm::ShardManifest manifest = writer.finish();
    std::cerr << "mlm: " << seqs << " sequences -> " << instances << " instances in "
              << manifest.shards.size() << " shards (" << out_dir << ")\n";
    return 0;
}

int cmd_stats(const std::vector<std::string>& inputs, const std::string& format,
              const std::string& tokenizer, const std::string& genre, bool as_json) {
    pipeline::TokenizerKind tok = tokenizer == "post-segmentation"
                                      ? pipeline::TokenizerKind::kPostSegmentation
                                      : pipeline::TokenizerKind::kWhitespace;
    pipeline::CorpusStats stats;
    for (const auto& path : inputs) {
        if (path == "-") {
            stats.merge(pipeline::compute_stats(std::cin, parse_format(format), tok,
                                                parse_genre(genre)));
        } else {
            stats.merge(pipeline::compute_stats_file(path, parse_format(format), tok,
                                                     parse_genre(genre)));
        }
    }
    if (as_json) {
        std::cout << stats.to_json() << '\n';
    } else {
        std::cout << "bytes\t" << stats.total.bytes << "\nlines\t" << stats.total.lines
                  << "\ntokens\t" << stats.total.tokens << '\n';
        for (const auto& [g, s] : stats.per_genre)
            std::cout << g << "\tbytes=" << s.bytes << " lines=" << s.lines
                      << " tokens=" << s.tokens << '\n';
    }
    return 0;
}

int cmd_mix(const std::vector<std::string>& inputs, const std::string& format,
            const std::vector<std::string>& proportions, uint64_t total_lines, uint64_t seed,
            const std::string& output) {
    pipeline::MixSpec mix;
    mix.enabled = true;
    mix.total_lines = total_lines;
    for (const auto& p : proportions) {
        size_t eq = p.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("mix: --proportion wants <genre>=<share>");
        mix.proportions[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
    }
    std::vector<pipeline::InputSpec> specs;
    for (const auto& in : inputs) {
        size_t colon = in.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("mix: --input wants <genre>:<path>");
        auto g = genre_from_name(in.substr(0, colon));
        if (!g) throw std::runtime_error("mix: unknown genre in --input " + in);
        specs.push_back({in.substr(colon + 1), parse_format(format), *g,
                         std::string(genre_name(*g))});
    }
    OutStream os;
    RecordWriter writer(os.get(output), parse_format(format));
    uint64_t n = pipeline::sample_mix(specs, mix, seed, writer);
    std::cerr << "mix: wrote " << n << " records\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int64_t seed,
            unsigned workers) {
    pipeline::PipelineConfig cfg = pipeline::PipelineConfig::from_json_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (workers > 0) cfg.workers = workers;
    pipeline::RunReport report = pipeline::run_pipeline(cfg);
    std::cerr << report.to_text();
    return 0;
}

int cmd_select_checkpoint(const std::string& matrix_path,
                          const std::vector<std::string>& models,
                          const std::string& policy_name, bool as_json) {
    eval::SelectionPolicy policy = policy_name == "mean_rank" ? eval::SelectionPolicy::kMeanRank
                                                              : eval::SelectionPolicy::kMean;
    if (!models.empty()) {
        std::vector<eval::ModelScores> scores;
        for (const auto& m : models) {
            size_t eq = m.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("select-checkpoint: --model wants <name>=<csv>");
            scores.push_back({m.substr(0, eq), eval::ScoreMatrix::load_csv(m.substr(eq + 1))});
        }
        eval::ComparisonTable table = eval::tabulate(scores, policy);
        std::cout << (as_json ? table.to_json() + "\n" : table.to_text());
        return 0;
    }
    if (matrix_path.empty())
        throw std::runtime_error("select-checkpoint: give --matrix or --model");
    eval::ScoreMatrix matrix = eval::ScoreMatrix::load_csv(matrix_path);
    eval::SelectionReport report = eval::select_checkpoint(matrix, policy);
    std::cout << (as_json ? report.to_json() + "\n" : report.to_text());
    return 0;
}

int cmd_score(const std::string& file, const std::string& type, const std::string& task,
              bool as_json) {
    double f1 = 0.0;
    std::string metric;
    if (type == "binary") {
        f1 = eval::f1_minority(eval::load_predictions(file, task));
        metric = "f1_minority";
    } else if (type == "multiclass") {
        f1 = eval::f1_macro(eval::load_predictions(file, task));
        metric = "f1_macro";
    } else if (type == "iob") {
        f1 = eval::span_f1(eval::load_iob(file));
        metric = "span_f1";
    } else {
        throw std::runtime_error("score: --type must be binary|multiclass|iob");
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", f1);
    if (as_json) {
        std::cout << "{\"task\": \"" << task << "\", \"metric\": \"" << metric
                  << "\", \"f1\": " << buf << "}\n";
    } else {
        std::cout << metric << '\t' << buf << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arabic pretraining corpus preparation and evaluation toolkit"};
    app.require_subcommand(1);

    // normalize
    auto* normalize = app.add_subcommand("normalize", "apply a normalization profile");
    CommonIo norm_io;
    norm_io.attach(normalize);
    std::string profile;
    std::string farsi_map;
    normalize->add_option("--profile", profile, "dedup-key|pretrain")
        ->required()
        ->check(CLI::IsMember({"dedup-key", "pretrain"}));
    normalize->add_option("--farsi-map", farsi_map, "two-column letter mapping file");

    // dedup
    auto* dedup_cmd = app.add_subcommand("dedup", "drop exact duplicates by normalized key");
    CommonIo dedup_io;
    dedup_io.attach(dedup_cmd);
    dedup::DedupOptions dopts;
    std::string spill_dir;
    std::string stats_out;
    int hash_bits = 128;
    dedup_cmd->add_option("--partitions", dopts.partitions, "hash partition count");
    dedup_cmd->add_option("--spill-dir", spill_dir, "partition spill directory");
    dedup_cmd->add_option("--hash-seed", dopts.hash_seed, "key hash seed");
    dedup_cmd->add_option("--hash-bits", hash_bits, "64 or 128")
        ->check(CLI::IsMember({64, 128}));
    dedup_cmd->add_flag("--paranoid", dopts.paranoid, "verify key hits by full string equality");
    dedup_cmd->add_flag("--all-genres", dopts.all_genres,
                        "dedup formal records too (default: tweets only)");
    dedup_cmd->add_option("--stats-out", stats_out, "write stats JSON here");

    // segment
    auto* segment = app.add_subcommand("segment", "clitic-segment Arabic words");
    CommonIo seg_io;
    seg_io.attach(segment);
    std::string segmenter = "builtin";
    std::string affix_table;
    std::string render = "plus-marks";
    int timeout_ms = 30000;
    segment->add_option("--segmenter", segmenter, "none|builtin|external:<cmd>");
    segment->add_option("--affix-table", affix_table, "affix inventory file");
    segment->add_option("--render", render, "plus-marks|space-joined")
        ->check(CLI::IsMember({"plus-marks", "space-joined"}));
    segment->add_option("--timeout-ms", timeout_ms, "idle timeout for external segmenters");

    // bpe-train
    auto* bpe_train = app.add_subcommand("bpe-train", "learn BPE merges");
    CommonIo bt_io;
    bt_io.attach(bpe_train);
    std::string model_dir;
    bpe::BpeTrainConfig bpe_cfg;
    bpe_train->add_option("--model-dir", model_dir, "output directory")->required();
    bpe_train->add_option("--target-vocab", bpe_cfg.target_vocab, "vocabulary bound");
    bpe_train->add_option("--min-frequency", bpe_cfg.min_frequency, "minimum pair count");
    bpe_train->add_option("--workers", bpe_cfg.workers, "counting threads");

    // bpe-encode
    auto* bpe_encode = app.add_subcommand("bpe-encode", "encode text to subword ids");
    CommonIo be_io;
    be_io.attach(bpe_encode);
    std::string encode_model_dir;
    bool decode = false;
    bpe_encode->add_option("--model-dir", encode_model_dir, "model directory")->required();
    bpe_encode->add_flag("--decode", decode, "invert: id lines back to text");

    // mlm
    auto* mlm_cmd = app.add_subcommand("mlm", "generate masked-LM instances and shards");
    std::vector<std::string> mlm_inputs;
    std::string mlm_model_dir;
    std::string mlm_out_dir;
    std::string mlm_format = "binary";
    mlm::MlmParams mlm_params;
    uint64_t shard_size = 100000;
    mlm_cmd->add_option("inputs", mlm_inputs, "encoded id files (one per shard)")->required();
    mlm_cmd->add_option("--model-dir", mlm_model_dir, "bpe model directory")->required();
    mlm_cmd->add_option("--out-dir", mlm_out_dir, "shard output directory")->required();
    mlm_cmd->add_option("--max-seq-len", mlm_params.max_seq_len, "instance length");
    mlm_cmd->add_option("--mask-prob", mlm_params.mask_prob, "per-position mask probability");
    mlm_cmd->add_option("--dup-factor", mlm_params.dup_factor, "instances per sequence");
    mlm_cmd->add_option("--seed", mlm_params.seed, "global rng seed");
    mlm_cmd->add_flag("--whole-word", mlm_params.whole_word, "mask whole words");
    mlm_cmd->add_option("--shard-size", shard_size, "instances per shard");
    mlm_cmd->add_option("--format", mlm_format, "binary|debug-text")
        ->check(CLI::IsMember({"binary", "debug-text"}));

    // stats
    auto* stats = app.add_subcommand("stats", "corpus size / lines / tokens");
    std::vector<std::string> stats_inputs;
    std::string stats_format = "raw";
    std::string stats_tokenizer = "whitespace";
    std::string stats_genre = "tweet";
    bool stats_json = false;
    stats->add_option("inputs", stats_inputs, "input files, - for stdin")->required();
    stats->add_option("--format", stats_format, "raw|jsonl")
        ->check(CLI::IsMember({"raw", "jsonl"}));
    stats->add_option("--tokenizer", stats_tokenizer, "whitespace|post-segmentation")
        ->check(CLI::IsMember({"whitespace", "post-segmentation"}));
    stats->add_option("--genre", stats_genre, "genre tag for raw records");
    stats->add_flag("--json", stats_json, "emit JSON");

    // mix
    auto* mix = app.add_subcommand("mix", "sample a genre-balanced corpus");
    std::vector<std::string> mix_inputs;
    std::vector<std::string> mix_props;
    std::string mix_format = "raw";
    std::string mix_output = "-";
    uint64_t mix_total = 0;
    uint64_t mix_seed_v = 1;
    mix->add_option("--input", mix_inputs, "<genre>:<path>, repeatable")->required();
    mix->add_option("--proportion", mix_props, "<genre>=<share>, repeatable")->required();
    mix->add_option("--total-lines", mix_total, "output size (0: largest possible)");
    mix->add_option("--seed", mix_seed_v, "sampling seed");
    mix->add_option("--format", mix_format, "raw|jsonl")
        ->check(CLI::IsMember({"raw", "jsonl"}));
    mix->add_option("-o,--output", mix_output, "output file, - for stdout");

    // run
    auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
    std::string run_config;
    std::string run_out_dir;
    int64_t run_seed = -1;
    unsigned run_workers = 0;
    run->add_option("--config", run_config, "pipeline config JSON")->required();
    run->add_option("--out-dir", run_out_dir, "override config out_dir");
    run->add_option("--seed", run_seed, "override config seed");
    run->add_option("--workers", run_workers, "override config workers");

    // select-checkpoint
    auto* select = app.add_subcommand("select-checkpoint",
                                      "pick the best checkpoint from a score matrix");
    std::string matrix_path;
    std::vector<std::string> model_matrices;
    std::string policy = "mean";
    bool select_json = false;
    select->add_option("--matrix", matrix_path, "score matrix CSV");
    select->add_option("--model", model_matrices,
                       "<name>=<csv>, repeatable; emits a comparison table");
    select->add_option("--policy", policy, "mean|mean_rank")
        ->check(CLI::IsMember({"mean", "mean_rank"}));
    select->add_flag("--json", select_json, "emit JSON");

    // score
    auto* score = app.add_subcommand("score", "F1 over a prediction file");
    std::string score_file;
    std::string score_type;
    std::string score_task = "task";
    bool score_json = false;
    score->add_option("file", score_file, "prediction file")->required();
    score->add_option("--type", score_type, "binary|multiclass|iob")->required();
    score->add_option("--task", score_task, "task name for reports");
    score->add_flag("--json", score_json, "emit JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (normalize->parsed()) return cmd_normalize(norm_io, profile, farsi_map);
        if (dedup_cmd->parsed()) {
            dopts.spill_dir = spill_dir;
            dopts.width = hash_bits == 64 ? dedup::HashWidth::k64 : dedup::HashWidth::k128;
            return cmd_dedup(dedup_io, dopts, stats_out);
        }
        if (segment->parsed())
            return cmd_segment(seg_io, segmenter, affix_table, render, timeout_ms);
        if (bpe_train->parsed()) return cmd_bpe_train(bt_io, model_dir, bpe_cfg);
        if (bpe_encode->parsed()) return cmd_bpe_encode(be_io, encode_model_dir, decode);
        if (mlm_cmd->parsed())
            return cmd_mlm(mlm_inputs, mlm_model_dir, mlm_out_dir, mlm_params, shard_size,
                           mlm_format);
        if (stats->parsed())
            return cmd_stats(stats_inputs, stats_format, stats_tokenizer, stats_genre,
                             stats_json);
        if (mix->parsed())
            return cmd_mix(mix_inputs, mix_format, mix_props, mix_total, mix_seed_v, mix_output);
        if (run->parsed()) return cmd_run(run_config, run_out_dir, run_seed, run_workers);
        if (select->parsed())
            return cmd_select_checkpoint(matrix_path, model_matrices, policy, select_json);
        if (score->parsed()) return cmd_score(score_file, score_type, score_task, score_json);
    } catch (const std::exception& e) {
        std::cerr << "arprep: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
