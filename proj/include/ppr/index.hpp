#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "ppr/graph.hpp"
#include "ppr/monte_carlo.hpp"
#include "ppr/parallel.hpp"
#include "ppr/sparse_vector.hpp"

namespace ppr {

// Stream is not a PWIX index (bad magic).
class IndexFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// PWIX stream with an unsupported version number.
class IndexVersionError : public IndexFormatError {
public:
    using IndexFormatError::IndexFormatError;
};

// PWIX stream damaged in transit (short read, impossible structure).
class IndexCorruptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// PWIX stream whose trailing CRC32 does not match its contents.
class IndexChecksumError : public IndexCorruptError {
public:
    using IndexCorruptError::IndexCorruptError;
};

// Precomputed approximate PPR vector for every vertex, plus the walk
// parameters it was built with. Immutable once built; concurrent reads are
// safe.
struct PprIndex {
    double teleport_c = 0.15;
    std::uint64_t walks_per_vertex = 0;  // R
    std::vector<SparseVector> fingerprints;

    VertexId num_vertices() const { return static_cast<VertexId>(fingerprints.size()); }
    bool empty() const { return fingerprints.empty(); }

    const SparseVector& fingerprint(VertexId u) const {
        if (u >= fingerprints.size())
            throw std::out_of_range("vertex " + std::to_string(u) + " not in index");
        return fingerprints[u];
    }
};

// Runs R full-path walks from every vertex and stores the resulting
// estimates. Vertices are processed in fixed-width id intervals that may run
// concurrently; each vertex's walks draw from its own RNG streams, so the
// result is identical for any worker count.
inline PprIndex build_index(const Graph& g, const WalkConfig& cfg, unsigned workers = 0) {
    cfg.validate();
    PprIndex idx;
    idx.teleport_c = cfg.teleport_c;
    idx.walks_per_vertex = cfg.num_walks;
    idx.fingerprints.resize(g.num_vertices());
    parallel_chunks(g.num_vertices(), 256, workers, [&](std::uint64_t, std::uint64_t begin,
                                                        std::uint64_t end) {
        for (std::uint64_t u = begin; u < end; ++u)
            idx.fingerprints[u] = mcfp_estimate(g, static_cast<VertexId>(u), cfg);
    });
    return idx;
}

namespace detail {

// PWIX serialization, little-endian throughout:
//   magic "PWIX" | version u16 | teleport_c f64 | R u64 | N u64 |
//   N times: entry count u32, then (vertex id u32, score f32) sorted by id |
//   CRC32 u32 over every preceding byte.
constexpr char kIndexMagic[4] = {'P', 'W', 'I', 'X'};
constexpr std::uint16_t kIndexVersion = 1;

inline void put_bytes(std::string& out, std::uint64_t value, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

class ByteReader {
public:
    explicit ByteReader(const std::string& buf) : buf_(buf) {}

    std::uint64_t take(int bytes) {
        if (pos_ + bytes > buf_.size())
            throw IndexCorruptError("index stream truncated at byte " + std::to_string(pos_));
        std::uint64_t value = 0;
        for (int i = 0; i < bytes; ++i)
            value |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i]))
                     << (8 * i);
        pos_ += bytes;
        return value;
    }

    std::size_t pos() const { return pos_; }

private:
    const std::string& buf_;
    std::size_t pos_ = 0;
};

} // namespace detail

// Writes the PWIX image of idx to sink; returns the byte count written.
inline std::uint64_t save_index(const PprIndex& idx, std::ostream& sink) {
    std::string buf;
    buf.append(detail::kIndexMagic, 4);
    detail::put_bytes(buf, detail::kIndexVersion, 2);
    detail::put_bytes(buf, std::bit_cast<std::uint64_t>(idx.teleport_c), 8);
    detail::put_bytes(buf, idx.walks_per_vertex, 8);
    detail::put_bytes(buf, idx.fingerprints.size(), 8);
    for (const SparseVector& fp : idx.fingerprints) {
        detail::put_bytes(buf, fp.size(), 4);
        for (const auto& [id, score] : fp) {
            detail::put_bytes(buf, id, 4);
            detail::put_bytes(buf, std::bit_cast<std::uint32_t>(static_cast<float>(score)), 4);
        }
    }
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size()));
    detail::put_bytes(buf, crc, 4);
    sink.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!sink) throw std::runtime_error("index write failed");
    return buf.size();
}

// Reads a PWIX image back. Rejects non-PWIX streams, unsupported versions,
// truncation, trailing garbage, and checksum mismatches with distinct error
// types.
inline PprIndex load_index(std::istream& source) {
    std::string buf((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
    detail::ByteReader reader(buf);
    char magic[4];
    for (char& ch : magic) ch = static_cast<char>(reader.take(1));
    if (std::string_view(magic, 4) != std::string_view(detail::kIndexMagic, 4))
        throw IndexFormatError("not a PWIX index stream");
    auto version = static_cast<std::uint16_t>(reader.take(2));
    if (version != detail::kIndexVersion)
        throw IndexVersionError("unsupported PWIX version " + std::to_string(version));

    PprIndex idx;
    idx.teleport_c = std::bit_cast<double>(reader.take(8));
    idx.walks_per_vertex = reader.take(8);
    std::uint64_t n = reader.take(8);
    if (n > std::numeric_limits<VertexId>::max())
        throw IndexCorruptError("vertex count out of range");
    idx.fingerprints.reserve(n);
    for (std::uint64_t u = 0; u < n; ++u) {
        auto count = static_cast<std::uint32_t>(reader.take(4));
        std::vector<std::pair<VertexId, Score>> entries;
        entries.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            auto id = static_cast<VertexId>(reader.take(4));
            float score = std::bit_cast<float>(static_cast<std::uint32_t>(reader.take(4)));
            if (!entries.empty() && id <= entries.back().first)
                throw IndexCorruptError("fingerprint ids out of order");
            if (!(score > 0.0f)) throw IndexCorruptError("non-positive fingerprint score");
            entries.emplace_back(id, static_cast<Score>(score));
        }
        idx.fingerprints.push_back(SparseVector::from_sorted(std::move(entries)));
    }
    std::uint64_t stored_crc = reader.take(4);
    if (reader.pos() != buf.size()) throw IndexCorruptError("trailing bytes after checksum");
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size() - 4));
    if (crc != stored_crc) throw IndexChecksumError("index checksum mismatch");
    return idx;
}

} // namespace ppr
