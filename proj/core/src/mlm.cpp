// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/mlm.hpp"

#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "arprep/hash128.hpp"
#include "json.hpp"

namespace arprep::mlm {

namespace fs = std::filesystem;

std::string_view shard_format_name(ShardFormat f) {
    return f == ShardFormat::kBinary ? "binary" : "debug-text";
}

InstanceGenerator::InstanceGenerator(const MlmParams& params, int32_t vocab_size)
    : params_(params), vocab_size_(vocab_size), rng_(params.seed) {
    if (params_.mask_prob < 0.0 || params_.mask_prob > 1.0)
        throw std::invalid_argument("mlm: mask_prob must be in [0, 1]");
    if (params_.max_seq_len < 8)
        throw std::invalid_argument("mlm: max_seq_len must be >= 8");
    if (params_.dup_factor < 1)
        throw std::invalid_argument("mlm: dup_factor must be >= 1");
    if (params_.mask_prob > 0.0 && vocab_size_ <= bpe::kNumSpecials)
        throw std::invalid_argument("mlm: vocabulary holds no maskable ids");
}

void InstanceGenerator::generate(const bpe::TokenSequence& seq, std::vector<MlmInstance>& out) {
    const size_t body = std::min(seq.ids.size(),
                                 static_cast<size_t>(params_.max_seq_len) - 2);
    if (body == 0) return;  // nothing maskable, no instance

    for (int32_t dup = 0; dup < params_.dup_factor; ++dup) {
        MlmInstance inst;
        inst.attention_length = static_cast<int32_t>(body) + 2;
        inst.input_ids.assign(static_cast<size_t>(params_.max_seq_len), bpe::kPad);
        inst.input_ids[0] = bpe::kCls;
        for (size_t i = 0; i < body; ++i) inst.input_ids[i + 1] = seq.ids[i];
        inst.input_ids[body + 1] = bpe::kSep;

        const auto corrupt = [&](size_t pos) {
            inst.mask_positions.push_back(static_cast<int32_t>(pos));
            inst.mask_labels.push_back(inst.input_ids[pos]);
            double r = rng_.uniform01();
            if (r < 0.8) {
                inst.input_ids[pos] = bpe::kMask;
            } else if (r < 0.9) {
                inst.input_ids[pos] = bpe::kNumSpecials +
                                      static_cast<int32_t>(rng_.below(
                                          static_cast<uint64_t>(vocab_size_ - bpe::kNumSpecials)));
            }  // else: left unchanged, still recorded
        };

        if (!params_.whole_word) {
            for (size_t i = 0; i < body; ++i) {
                if (seq.ids[i] < bpe::kNumSpecials) continue;
                if (rng_.uniform01() < params_.mask_prob) corrupt(i + 1);
            }
        } else {
            // Group subwords into words via the continuation flags; a group
            // is selected as one unit.
            size_t i = 0;
            while (i < body) {
                size_t j = i + 1;
                while (j < body && j < seq.is_continuation.size() && seq.is_continuation[j]) ++j;
                bool maskable = true;
                for (size_t k = i; k < j; ++k)
                    if (seq.ids[k] < bpe::kNumSpecials) maskable = false;
                if (maskable && rng_.uniform01() < params_.mask_prob)
                    for (size_t k = i; k < j; ++k) corrupt(k + 1);
                i = j;
            }
        }
        out.push_back(std::move(inst));
    }
}

std::vector<MlmInstance> make_instances(const std::vector<bpe::TokenSequence>& seqs,
                                        const MlmParams& params, int32_t vocab_size) {
    InstanceGenerator gen(params, vocab_size);
    std::vector<MlmInstance> out;
    for (const auto& seq : seqs) gen.generate(seq, out);
    return out;
}

namespace {

constexpr char kBinaryMagic[8] = {'A', 'R', 'P', 'S', 'H', 'R', 'D', '1'};

void put_u32(std::string& buf, uint32_t v) {
    char b[4];
    b[0] = static_cast<char>(v & 0xFF);
    b[1] = static_cast<char>((v >> 8) & 0xFF);
    b[2] = static_cast<char>((v >> 16) & 0xFF);
    b[3] = static_cast<char>((v >> 24) & 0xFF);
    buf.append(b, 4);
}

uint32_t get_u32(const char* p) {
    return static_cast<uint32_t>(static_cast<unsigned char>(p[0])) |
           (static_cast<uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
           (static_cast<uint32_t>(static_cast<unsigned char>(p[2])) << 16) |
           (static_cast<uint32_t>(static_cast<unsigned char>(p[3])) << 24);
}

std::string binary_record(const MlmInstance& inst) {
    std::string payload;
    payload.reserve(12 + 4 * (inst.input_ids.size() + 2 * inst.mask_positions.size()));
    put_u32(payload, static_cast<uint32_t>(inst.attention_length));
    put_u32(payload, static_cast<uint32_t>(inst.mask_positions.size()));
    for (int32_t v : inst.input_ids) put_u32(payload, static_cast<uint32_t>(v));
    for (int32_t v : inst.mask_positions) put_u32(payload, static_cast<uint32_t>(v));
    for (int32_t v : inst.mask_labels) put_u32(payload, static_cast<uint32_t>(v));
    std::string rec;
    put_u32(rec, static_cast<uint32_t>(payload.size()));
    rec += payload;
    return rec;
}

std::string debug_record(const MlmInstance& inst) {
    nlohmann::json j{{"attention_length", inst.attention_length},
                     {"input_ids", inst.input_ids},
                     {"mask_positions", inst.mask_positions},
                     {"mask_labels", inst.mask_labels}};
    return j.dump();
}

nlohmann::json params_json(const MlmParams& p, uint64_t shard_size, ShardFormat format) {
    return {{"max_seq_len", p.max_seq_len}, {"mask_prob", p.mask_prob},
            {"dup_factor", p.dup_factor},   {"seed", p.seed},
            {"whole_word", p.whole_word},   {"shard_size", shard_size},
            {"record_format", std::string(shard_format_name(format))}};
}

}  // namespace

struct ShardWriter::Impl {
    fs::path out_dir;
    uint64_t shard_size;
    ShardFormat format;
    MlmParams params;
    std::vector<std::string> assumed_defaults;

    std::ofstream cur;
    fs::path cur_path;
    uint64_t cur_count = 0;
    std::vector<ShardInfo> shards;
    uint64_t total_instances = 0;
    uint64_t total_tokens = 0;
    bool finished = false;

    void open_next() {
        char name[32];
        std::snprintf(name, sizeof(name), "shard-%05zu.%s", shards.size(),
                      format == ShardFormat::kBinary ? "bin" : "jsonl");
        cur_path = out_dir / name;
        cur.open(cur_path, std::ios::trunc | std::ios::binary);
        if (!cur) throw std::runtime_error("mlm shards: cannot open " + cur_path.string());
        if (format == ShardFormat::kBinary) {
            cur.write(kBinaryMagic, sizeof(kBinaryMagic));
            std::string hdr;
            put_u32(hdr, 1u);  // version
            put_u32(hdr, static_cast<uint32_t>(params.max_seq_len));
            cur.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
        }
        shards.push_back({name, 0});
        cur_count = 0;
    }

    void close_cur() {
        if (!cur.is_open()) return;
        cur.close();
        shards.back().instances = cur_count;
    }
};

ShardWriter::ShardWriter(fs::path out_dir, uint64_t shard_size, ShardFormat format,
                         const MlmParams& params, std::vector<std::string> assumed_defaults)
    : impl_(std::make_unique<Impl>()) {
    if (shard_size == 0) throw std::invalid_argument("mlm shards: shard_size must be >= 1");
    impl_->out_dir = std::move(out_dir);
    impl_->shard_size = shard_size;
    impl_->format = format;
    impl_->params = params;
    impl_->assumed_defaults = std::move(assumed_defaults);
    fs::create_directories(impl_->out_dir);
}

ShardWriter::~ShardWriter() = default;

void ShardWriter::add(const MlmInstance& inst) {
    Impl& im = *impl_;
    if (!im.cur.is_open() || im.cur_count >= im.shard_size) {
        im.close_cur();
        im.open_next();
    }
    std::string rec = im.format == ShardFormat::kBinary ? binary_record(inst)
                                                        : debug_record(inst) + "\n";
    im.cur.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    if (!im.cur)
        throw std::runtime_error("mlm shards: write failed on " + im.cur_path.string());
    ++im.cur_count;
    ++im.total_instances;
    im.total_tokens += static_cast<uint64_t>(inst.attention_length);
}

ShardManifest ShardWriter::finish() {
    Impl& im = *impl_;
    if (im.finished) throw std::logic_error("mlm shards: finish() called twice");
    im.close_cur();
    im.finished = true;

    ShardManifest m;
    m.record_format = im.format;
    m.params = im.params;
    m.shard_size = im.shard_size;
    m.shards = im.shards;
    m.total_instances = im.total_instances;
    m.total_tokens = im.total_tokens;
    m.assumed_defaults = im.assumed_defaults;
    nlohmann::json pj = params_json(im.params, im.shard_size, im.format);
    m.params_hash = murmur3_128(pj.dump(), /*seed=*/0).hex();

    nlohmann::json j{{"format_version", m.format_version},
                     {"record_format", std::string(shard_format_name(m.record_format))},
                     {"params", pj},
                     {"params_hash", m.params_hash},
                     {"assumed_defaults", m.assumed_defaults},
                     {"total_instances", m.total_instances},
                     {"total_tokens", m.total_tokens}};
    j["shards"] = nlohmann::json::array();
    for (const auto& s : m.shards)
        j["shards"].push_back({{"path", s.path}, {"instances", s.instances}});

    const fs::path tmp = im.out_dir / "manifest.json.tmp";
    const fs::path final_path = im.out_dir / "manifest.json";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("mlm shards: write failed on " + tmp.string());
    }
    fs::rename(tmp, final_path);  // manifest appears only when shards are complete
    return m;
}

ShardManifest write_shards(const std::vector<MlmInstance>& instances, uint64_t shard_size,
                           const fs::path& out_dir, ShardFormat format, const MlmParams& params) {
    ShardWriter writer(out_dir, shard_size, format, params);
    for (const auto& inst : instances) writer.add(inst);
    return writer.finish();
}

ShardManifest read_manifest(const fs::path& dir) {
    const fs::path file = fs::is_directory(dir) ? dir / "manifest.json" : dir;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("mlm shards: cannot open manifest " + file.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw std::runtime_error("mlm shards: corrupt manifest " + file.string());

    ShardManifest m;
    m.format_version = j.at("format_version").get<int32_t>();
    std::string fmt = j.at("record_format").get<std::string>();
    m.record_format = fmt == "binary" ? ShardFormat::kBinary : ShardFormat::kDebugText;
    const auto& p = j.at("params");
    m.params.max_seq_len = p.at("max_seq_len").get<int32_t>();
    m.params.mask_prob = p.at("mask_prob").get<double>();
    m.params.dup_factor = p.at("dup_factor").get<int32_t>();
    m.params.seed = p.at("seed").get<uint64_t>();
    m.params.whole_word = p.at("whole_word").get<bool>();
    m.shard_size = p.at("shard_size").get<uint64_t>();
    m.params_hash = j.at("params_hash").get<std::string>();
    m.total_instances = j.at("total_instances").get<uint64_t>();
    m.total_tokens = j.at("total_tokens").get<uint64_t>();
    for (const auto& a : j.value("assumed_defaults", nlohmann::json::array()))
        m.assumed_defaults.push_back(a.get<std::string>());
    for (const auto& s : j.at("shards"))
        m.shards.push_back({s.at("path").get<std::string>(), s.at("instances").get<uint64_t>()});
    return m;
}

namespace {

std::vector<MlmInstance> read_binary_shard(const fs::path& path, int32_t max_seq_len) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("mlm shards: cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 16 || std::memcmp(data.data(), kBinaryMagic, 8) != 0)
        throw std::runtime_error("mlm shards: bad magic in " + path.string());
    if (get_u32(data.data() + 8) != 1)
        throw std::runtime_error("mlm shards: unsupported version in " + path.string());
    if (get_u32(data.data() + 12) != static_cast<uint32_t>(max_seq_len))
        throw std::runtime_error("mlm shards: max_seq_len mismatch in " + path.string());

    std::vector<MlmInstance> out;
    size_t off = 16;
    while (off < data.size()) {
        if (off + 4 > data.size())
            throw std::runtime_error("mlm shards: truncated record in " + path.string());
        uint32_t len = get_u32(data.data() + off);
        off += 4;
        if (off + len > data.size())
            throw std::runtime_error("mlm shards: truncated record in " + path.string());
        const char* p = data.data() + off;
        MlmInstance inst;
        inst.attention_length = static_cast<int32_t>(get_u32(p));
        uint32_t n_masks = get_u32(p + 4);
        size_t need = 8 + 4 * (static_cast<size_t>(max_seq_len) + 2 * n_masks);
        if (len != need)
            throw std::runtime_error("mlm shards: record length mismatch in " + path.string());
        p += 8;
        inst.input_ids.resize(static_cast<size_t>(max_seq_len));
        for (auto& v : inst.input_ids) v = static_cast<int32_t>(get_u32(p)), p += 4;
        inst.mask_positions.resize(n_masks);
        for (auto& v : inst.mask_positions) v = static_cast<int32_t>(get_u32(p)), p += 4;
        inst.mask_labels.resize(n_masks);
        for (auto& v : inst.mask_labels) v = static_cast<int32_t>(get_u32(p)), p += 4;
        out.push_back(std::move(inst));
        off += len;
    }
    return out;
}

std::vector<MlmInstance> read_debug_shard(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("mlm shards: cannot open " + path.string());
    std::vector<MlmInstance> out;
    std::string line;
    while (std::getline(in, line)) {
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error("mlm shards: corrupt record in " + path.string());
        MlmInstance inst;
        inst.attention_length = j.at("attention_length").get<int32_t>();
        inst.input_ids = j.at("input_ids").get<std::vector<int32_t>>();
        inst.mask_positions = j.at("mask_positions").get<std::vector<int32_t>>();
        inst.mask_labels = j.at("mask_labels").get<std::vector<int32_t>>();
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace

std::vector<MlmInstance> read_shards(const fs::path& dir) {
    ShardManifest m = read_manifest(dir);
    const fs::path base = fs::is_directory(dir) ? dir : dir.parent_path();
    std::vector<MlmInstance> out;
    for (const auto& s : m.shards) {
        auto part = m.record_format == ShardFormat::kBinary
                        ? read_binary_shard(base / s.path, m.params.max_seq_len)
                        : read_debug_shard(base / s.path);
        if (part.size() != s.instances)
            throw std::runtime_error("mlm shards: " + s.path + " holds " +
                                     std::to_string(part.size()) + " instances, manifest says " +
                                     std::to_string(s.instances));
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    if (out.size() != m.total_instances)
        throw std::runtime_error("mlm shards: total instance count mismatch");
    return out;
}

}  // namespace arprep::mlm
