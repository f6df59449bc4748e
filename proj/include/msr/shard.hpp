#ifndef MSR_SHARD_HPP
#define MSR_SHARD_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msr/codec.hpp"
#include "msr/errors.hpp"
#include "msr/params.hpp"

namespace msr {

inline std::uint32_t crc32(std::span<const std::uint8_t> data) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int b = 0; b < 8; ++b) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) c = table[(c ^ byte) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

/// Fixed 42-byte shard header; every multi-byte field is big-endian.
/// Self-describing: decode and repair need nothing beyond the shard files.
struct ShardHeader {
    static constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'S', 'R', 'C'};
    static constexpr std::uint8_t kVersion = 1;
    static constexpr std::size_t kSize = 42;

    std::uint8_t version = kVersion;
    std::uint8_t m = 0;
    std::uint32_t modulus = 0;
    std::uint8_t q = 0, t = 0;
    std::uint16_t r = 0, n = 0, k = 0, d = 0;
    std::uint16_t node_id = 0;
    std::uint64_t stripe_count = 0;
    std::uint64_t payload_len = 0;

    static ShardHeader for_params(const CodeParams& p, const Field& f, int node_id,
                                  std::uint64_t stripes, std::uint64_t payload_len) {
        ShardHeader h;
        h.m = static_cast<std::uint8_t>(p.m);
        h.modulus = f.modulus();
        h.q = static_cast<std::uint8_t>(p.q);
        h.t = static_cast<std::uint8_t>(p.t);
        h.r = static_cast<std::uint16_t>(p.r);
        h.n = static_cast<std::uint16_t>(p.n);
        h.k = static_cast<std::uint16_t>(p.k);
        h.d = static_cast<std::uint16_t>(p.d);
        h.node_id = static_cast<std::uint16_t>(node_id);
        h.stripe_count = stripes;
        h.payload_len = payload_len;
        return h;
    }

    std::array<std::uint8_t, kSize> to_bytes() const {
        std::array<std::uint8_t, kSize> b{};
        std::size_t at = 0;
        auto put = [&](std::uint64_t v, int bytes) {
            for (int i = bytes - 1; i >= 0; --i) b[at++] = static_cast<std::uint8_t>(v >> (8 * i));
        };
        std::memcpy(b.data(), kMagic.data(), 4);
        at = 4;
        put(version, 1);
        put(m, 1);
        put(modulus, 4);
        put(q, 1);
        put(t, 1);
        put(r, 2);
        put(n, 2);
        put(k, 2);
        put(d, 2);
        put(node_id, 2);
        put(stripe_count, 8);
        put(payload_len, 8);
        put(crc32({b.data(), at}), 4);
        return b;
    }

    /// Parses and validates magic, version, CRC, parameter consistency.
    static ShardHeader from_bytes(std::span<const std::uint8_t> b) {
        if (b.size() < kSize) throw io_error("shard header truncated");
        if (std::memcmp(b.data(), kMagic.data(), 4) != 0) throw io_error("bad shard magic");
        std::size_t at = 4;
        auto get = [&](int bytes) {
            std::uint64_t v = 0;
            for (int i = 0; i < bytes; ++i) v = (v << 8) | b[at++];
            return v;
        };
        ShardHeader h;
        h.version = static_cast<std::uint8_t>(get(1));
        if (h.version != kVersion) throw io_error("unsupported shard version");
        h.m = static_cast<std::uint8_t>(get(1));
        h.modulus = static_cast<std::uint32_t>(get(4));
        h.q = static_cast<std::uint8_t>(get(1));
        h.t = static_cast<std::uint8_t>(get(1));
        h.r = static_cast<std::uint16_t>(get(2));
        h.n = static_cast<std::uint16_t>(get(2));
        h.k = static_cast<std::uint16_t>(get(2));
        h.d = static_cast<std::uint16_t>(get(2));
        h.node_id = static_cast<std::uint16_t>(get(2));
        h.stripe_count = get(8);
        h.payload_len = get(8);
        const std::uint32_t want = static_cast<std::uint32_t>(get(4));
        if (crc32({b.data(), kSize - 4}) != want) throw io_error("shard header CRC mismatch");

        try {
            const CodeParams p = derive_params(h.n, h.k, h.d);
            const Field f(h.m);
            if (p.q != h.q || p.t != h.t || p.r != h.r || p.m != h.m || f.modulus() != h.modulus)
                throw io_error("shard header parameters are inconsistent");
        } catch (const param_error& e) {
            throw io_error(std::string("shard header parameters invalid: ") + e.what());
        }
        if (h.node_id >= h.n) throw io_error("shard node id out of range");
        return h;
    }
};

/// Reads m-bit groups from a byte stream, most significant bit first;
/// past-the-end reads return zero (the final stripe's padding).
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

    gf_elem read(int bits) {
        std::uint32_t v = 0;
        for (int i = 0; i < bits; ++i) {
            const std::size_t byte = pos_ >> 3;
            const int bit = 7 - static_cast<int>(pos_ & 7);
            v = (v << 1) | (byte < data_.size() ? (data_[byte] >> bit) & 1u : 0u);
            ++pos_;
        }
        return static_cast<gf_elem>(v);
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// Writes m-bit groups most significant bit first.
class BitWriter {
public:
    void write(gf_elem value, int bits) {
        for (int i = bits - 1; i >= 0; --i) {
            if (fill_ == 0) out_.push_back(0);
            out_.back() = static_cast<std::uint8_t>(out_.back() | (((value >> i) & 1u) << (7 - fill_)));
            fill_ = (fill_ + 1) & 7;
        }
    }
    const std::vector<std::uint8_t>& bytes() const { return out_; }

private:
    std::vector<std::uint8_t> out_;
    int fill_ = 0;
};

namespace detail {

inline void put_symbol(std::vector<std::uint8_t>& out, gf_elem v, int elem_bytes) {
    for (int i = elem_bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline gf_elem get_symbol(std::span<const std::uint8_t> in, std::size_t at, int elem_bytes) {
    std::uint32_t v = 0;
    for (int i = 0; i < elem_bytes; ++i) v = (v << 8) | in[at + i];
    return static_cast<gf_elem>(v);
}

inline std::string shard_name(int node_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "shard_%03d.msrc", node_id);
    return buf;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw io_error("short write to " + path.string());
}

// All shard headers in a directory, keyed by node id. Files that do not
// start with the magic are ignored; files that do but fail validation
// (damaged CRC, inconsistent fields) are an error, not a skip.
inline std::map<int, std::filesystem::path> scan_shards(const std::filesystem::path& dir,
                                                        std::optional<ShardHeader>& common) {
    if (!std::filesystem::is_directory(dir)) throw io_error(dir.string() + " is not a directory");
    std::map<int, std::filesystem::path> found;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::array<std::uint8_t, ShardHeader::kSize> raw{};
        if (!in.read(reinterpret_cast<char*>(raw.data()), raw.size())) continue;
        ShardHeader h;
        try {
            h = ShardHeader::from_bytes(raw);
        } catch (const io_error&) {
            if (std::memcmp(raw.data(), ShardHeader::kMagic.data(), 4) == 0)
                throw io_error("damaged shard header in " + entry.path().string());
            continue; // not a shard
        }
        if (common) {
            const auto& c = *common;
            if (c.n != h.n || c.k != h.k || c.d != h.d || c.m != h.m ||
                c.stripe_count != h.stripe_count || c.payload_len != h.payload_len)
                throw io_error("shards in " + dir.string() + " disagree on code parameters");
        } else {
            common = h;
        }
        if (found.count(h.node_id))
            throw io_error("duplicate shard for node " + std::to_string(h.node_id));
        found.emplace(h.node_id, entry.path());
    }
    return found;
}

} // namespace detail

/// Split a file into stripes of k*alpha field symbols (m bits of input per
/// symbol, zero-padded final stripe) and write one shard per real node:
/// header, then that node's alpha symbols per stripe, big-endian
/// ceil(m/8)-byte each.
inline void encode_file(const CodeParams& p, const ThetaTable& tt,
                        const std::filesystem::path& input,
                        const std::filesystem::path& out_dir) {
    if (!std::filesystem::is_regular_file(input))
        throw io_error(input.string() + " is not a regular file");
    const std::vector<std::uint8_t> data = detail::read_file(input);
    const Field& f = tt.field();
    const std::uint64_t bits_per_stripe =
        static_cast<std::uint64_t>(p.k) * p.alpha * static_cast<std::uint64_t>(p.m);
    const std::uint64_t stripes =
        (static_cast<std::uint64_t>(data.size()) * 8 + bits_per_stripe - 1) / bits_per_stripe;

    std::filesystem::create_directories(out_dir);
    const int eb = f.elem_bytes();
    std::vector<std::vector<std::uint8_t>> node_payload(p.n);
    for (int node = 0; node < p.n; ++node)
        node_payload[node].reserve(stripes * p.alpha * static_cast<std::uint64_t>(eb));

    BitReader reader({data.data(), data.size()});
    std::vector<gf_elem> message(static_cast<std::size_t>(p.k) * p.alpha);
    for (std::uint64_t s = 0; s < stripes; ++s) {
        for (auto& sym : message) sym = reader.read(p.m);
        const Codeword cw = encode(p, tt, message);
        for (int node = 0; node < p.n; ++node)
            for (plane_t z = 0; z < p.alpha; ++z)
                detail::put_symbol(node_payload[node], cw.at(node, z), eb);
    }

    for (int node = 0; node < p.n; ++node) {
        const ShardHeader h = ShardHeader::for_params(p, f, node, stripes, data.size());
        const auto head = h.to_bytes();
        std::vector<std::uint8_t> file(head.begin(), head.end());
        file.insert(file.end(), node_payload[node].begin(), node_payload[node].end());
        detail::write_file(out_dir / detail::shard_name(node), file);
    }
}

/// Rebuild the original file from any >= k consistent shards in a directory.
inline void decode_file(const std::filesystem::path& shards_dir,
                        const std::filesystem::path& out_path) {
    std::optional<ShardHeader> common;
    const auto found = detail::scan_shards(shards_dir, common);
    if (!common) throw io_error("no shards found in " + shards_dir.string());
    const ShardHeader& h = *common;
    if (static_cast<int>(found.size()) < h.k)
        throw unrecoverable_error("need at least k=" + std::to_string(h.k) + " shards, found " +
                                  std::to_string(found.size()));

    const CodeParams p = derive_params(h.n, h.k, h.d);
    const Field f(p.m);
    const ThetaTable tt = assign_thetas(p, f);
    const int eb = f.elem_bytes();

    std::map<int, std::vector<std::uint8_t>> shard_data;
    const std::uint64_t expect =
        ShardHeader::kSize + h.stripe_count * p.alpha * static_cast<std::uint64_t>(eb);
    for (const auto& [node, path] : found) {
        auto bytes = detail::read_file(path);
        if (bytes.size() != expect)
            throw io_error("shard for node " + std::to_string(node) + " has wrong length");
        shard_data.emplace(node, std::move(bytes));
    }

    std::vector<int> erased;
    for (int node = 0; node < p.n; ++node)
        if (!found.count(node)) erased.push_back(node);

    BitWriter writer;
    for (std::uint64_t s = 0; s < h.stripe_count; ++s) {
        Codeword cw(p);
        for (const auto& [node, bytes] : shard_data)
            for (plane_t z = 0; z < p.alpha; ++z)
                cw.set(node, z,
                       detail::get_symbol({bytes.data(), bytes.size()},
                                          ShardHeader::kSize + (s * p.alpha + z) * eb, eb));
        const Codeword full = decode(p, tt, ErasureState::from_codeword(p, cw, erased));
        for (int node = 0; node < p.k; ++node)
            for (plane_t z = 0; z < p.alpha; ++z) writer.write(full.at(node, z), p.m);
    }

    std::vector<std::uint8_t> out = writer.bytes();
    if (out.size() < h.payload_len) throw internal_error("decoded payload shorter than header claims");
    out.resize(h.payload_len);
    detail::write_file(out_path, out);
}

struct FileRepairStats {
    std::vector<int> helpers;
    std::uint64_t bytes_read_per_helper = 0; // symbol data only, headers aside
    std::uint64_t stripe_count = 0;
};

/// Rebuild one node's shard by contacting d helper shards and reading exactly
/// beta symbols per stripe from each (seek + read, no full-shard scans).
inline FileRepairStats repair_file(const std::filesystem::path& shards_dir, int failed_id,
                                   const std::filesystem::path& out_path) {
    std::optional<ShardHeader> common;
    const auto found = detail::scan_shards(shards_dir, common);
    if (!common) throw io_error("no shards found in " + shards_dir.string());
    const ShardHeader& h = *common;
    if (failed_id < 0 || failed_id >= h.n)
        throw param_error("failed node id must be in [0, n)");
    if (found.count(failed_id))
        throw param_error("shard for node " + std::to_string(failed_id) +
                          " is still present; nothing to repair");

    const CodeParams p = derive_params(h.n, h.k, h.d);
    const Field f(p.m);
    const ThetaTable tt = assign_thetas(p, f);
    const int eb = f.elem_bytes();

    std::vector<int> helpers;
    for (const auto& [node, path] : found) {
        if (static_cast<int>(helpers.size()) == p.d) break;
        helpers.push_back(node);
    }
    if (static_cast<int>(helpers.size()) < p.d)
        throw unrecoverable_error("repair needs d=" + std::to_string(p.d) + " helpers, found " +
                                  std::to_string(helpers.size()));

    const std::vector<plane_t> r_planes = repair_planes(p, failed_id);
    std::vector<std::ifstream> streams;
    streams.reserve(helpers.size());
    for (int node : helpers) {
        streams.emplace_back(found.at(node), std::ios::binary);
        if (!streams.back()) throw io_error("cannot open shard for node " + std::to_string(node));
    }

    std::uint64_t bytes_per_helper = 0;
    std::vector<std::uint8_t> out;
    {
        const ShardHeader oh = ShardHeader::for_params(p, f, failed_id, h.stripe_count, h.payload_len);
        const auto head = oh.to_bytes();
        out.assign(head.begin(), head.end());
    }
    std::vector<std::vector<gf_elem>> payload(helpers.size(),
                                              std::vector<gf_elem>(r_planes.size(), 0));
    std::uint64_t first_helper_bytes = 0;
    for (std::uint64_t s = 0; s < h.stripe_count; ++s) {
        for (std::size_t hi = 0; hi < helpers.size(); ++hi) {
            for (std::size_t i = 0; i < r_planes.size(); ++i) {
                const std::uint64_t off =
                    ShardHeader::kSize + (s * p.alpha + r_planes[i]) * static_cast<std::uint64_t>(eb);
                streams[hi].seekg(static_cast<std::streamoff>(off));
                std::array<std::uint8_t, 2> raw{};
                if (!streams[hi].read(reinterpret_cast<char*>(raw.data()), eb))
                    throw io_error("short read from helper shard " + std::to_string(helpers[hi]));
                payload[hi][i] = detail::get_symbol({raw.data(), raw.size()}, 0, eb);
                if (hi == 0) first_helper_bytes += static_cast<std::uint64_t>(eb);
            }
        }
        const RepairResult res =
            detail::repair_from_payload(p, tt, failed_id, helpers, r_planes, payload);
        for (plane_t z = 0; z < p.alpha; ++z) detail::put_symbol(out, res.symbols[z], eb);
    }
    bytes_per_helper = first_helper_bytes;

    detail::write_file(out_path, out);
    return {helpers, bytes_per_helper, h.stripe_count};
}

} // namespace msr

#endif
