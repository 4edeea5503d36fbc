#pragma once

// Streaming FASTA reader/writer. Memory use is bounded by the record being
// read. gzip input is recognised by its magic bytes and inflated on the fly.

#include <zlib.h>

#include <array>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <ranges>
#include <streambuf>
#include <string>
#include <string_view>

#include "slidealign/blosum62.hpp"
#include "slidealign/errors.hpp"

namespace slidealign {

struct FastaRecord {
    std::string id;
    std::string description;
    std::string sequence;

    bool operator==(const FastaRecord&) const = default;
};

/// Structural problem in the input (data before a header, empty record, ...).
class FastaFormatError : public Error {
public:
    FastaFormatError(const std::string& what, std::size_t line)
        : Error("FASTA line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A record containing a residue outside the alphabet. The reader has already
/// consumed the record, so reading can continue with the next one.
class InvalidRecordError : public AlphabetError {
public:
    InvalidRecordError(char residue, std::string id, std::size_t ordinal, std::size_t line)
        : AlphabetError(residue, "FASTA record #" + std::to_string(ordinal) + " '" + id + "' (line " +
                                     std::to_string(line) + ")"),
          id_(std::move(id)),
          ordinal_(ordinal) {}

    const std::string& id() const noexcept { return id_; }
    std::size_t ordinal() const noexcept { return ordinal_; }

private:
    std::string id_;
    std::size_t ordinal_;
};

enum class ResiduePolicy { reject, replace_with_x };

struct FastaOptions {
    ResiduePolicy policy = ResiduePolicy::reject;
    bool allow_stop = true;  // accept '*'
    std::string alphabet{detail::kBlosum62Alphabet};
};

namespace detail {

/// Inflates a gzip (possibly multi-member) byte stream read from `source`.
class GzipStreambuf : public std::streambuf {
public:
    explicit GzipStreambuf(std::streambuf* source) : source_(source) {
        stream_.zalloc = Z_NULL;
        stream_.zfree = Z_NULL;
        stream_.opaque = Z_NULL;
        stream_.next_in = Z_NULL;
        stream_.avail_in = 0;
        if (inflateInit2(&stream_, 16 + MAX_WBITS) != Z_OK) throw Error("gzip: inflateInit2 failed");
        setg(out_.data(), out_.data(), out_.data());
    }

    GzipStreambuf(const GzipStreambuf&) = delete;
    GzipStreambuf& operator=(const GzipStreambuf&) = delete;

    ~GzipStreambuf() override { inflateEnd(&stream_); }

protected:
    int_type underflow() override {
        if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
        while (true) {
            if (stream_.avail_in == 0 && !refill()) {
                if (!finished_member_ && started_) throw Error("gzip: truncated stream");
                return traits_type::eof();
            }
            if (finished_member_) {
                // Another member follows.
                if (inflateReset(&stream_) != Z_OK) throw Error("gzip: inflateReset failed");
                finished_member_ = false;
            }
            started_ = true;
            stream_.next_out = reinterpret_cast<Bytef*>(out_.data());
            stream_.avail_out = static_cast<uInt>(out_.size());
            const int rc = inflate(&stream_, Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                finished_member_ = true;
            } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
                throw Error(std::string("gzip: ") + (stream_.msg ? stream_.msg : "inflate failed"));
            }
            const std::size_t produced = out_.size() - stream_.avail_out;
            if (produced > 0) {
                setg(out_.data(), out_.data(), out_.data() + produced);
                return traits_type::to_int_type(*gptr());
            }
        }
    }

private:
    bool refill() {
        const std::streamsize got = source_->sgetn(in_.data(), static_cast<std::streamsize>(in_.size()));
        if (got <= 0) return false;
        stream_.next_in = reinterpret_cast<Bytef*>(in_.data());
        stream_.avail_in = static_cast<uInt>(got);
        return true;
    }

    std::streambuf* source_;
    z_stream stream_{};
    std::array<char, 1 << 16> in_{};
    std::array<char, 1 << 16> out_{};
    bool started_ = false;
    bool finished_member_ = false;
};

inline bool starts_with_gzip_magic(std::streambuf* buf) {
    const auto first = buf->sbumpc();
    if (first == std::char_traits<char>::eof()) return false;
    const auto second = buf->sgetc();
    if (buf->sungetc() == std::char_traits<char>::eof())
        throw Error("FASTA: input stream does not support one-byte putback");
    return first == 0x1f && second == 0x8b;
}

}  // namespace detail

/// Pull parser: `next()` yields records in file order, `std::nullopt` at end.
class FastaReader {
public:
    explicit FastaReader(std::istream& in, FastaOptions options = {}) : options_(std::move(options)) {
        init_alphabet();
        attach(in);
    }

    static FastaReader open(const std::filesystem::path& path, FastaOptions options = {}) {
        auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*file) throw Error("cannot open FASTA file " + path.string());
        FastaReader reader(std::move(file), std::move(options));
        return reader;
    }

    FastaReader(FastaReader&&) = default;
    FastaReader& operator=(FastaReader&&) = default;

    std::optional<FastaRecord> next() {
        if (!header_pending_) {
            while (true) {
                if (!read_line()) return std::nullopt;
                if (is_skippable(line_)) continue;
                if (line_.front() == '>') break;
                throw FastaFormatError("sequence data before the first header", line_no_);
            }
        }
        header_pending_ = false;
        const std::size_t header_line = line_no_;
        FastaRecord rec;
        split_header(std::string_view(line_).substr(1), rec.id, rec.description);
        const std::size_t ordinal = records_++;
        if (rec.id.empty()) throw FastaFormatError("header without an identifier", header_line);

        char bad = 0;
        bool has_bad = false;
        while (read_line()) {
            if (is_skippable(line_)) continue;
            if (line_.front() == '>') {
                header_pending_ = true;
                break;
            }
            for (char c : line_) {
                if (std::isspace(static_cast<unsigned char>(c))) continue;
                const auto up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                if (accepted_[static_cast<unsigned char>(up)]) {
                    rec.sequence += up;
                } else if (options_.policy == ResiduePolicy::replace_with_x) {
                    rec.sequence += 'X';
                    ++replaced_;
                } else if (!has_bad) {
                    has_bad = true;
                    bad = c;
                }
            }
        }
        if (has_bad) throw InvalidRecordError(bad, rec.id, ordinal, header_line);
        if (rec.sequence.empty()) throw FastaFormatError("record '" + rec.id + "' has an empty sequence", header_line);
        return rec;
    }

    /// Records seen so far, including rejected ones.
    std::size_t records_seen() const noexcept { return records_; }
    /// Residues substituted with X under ResiduePolicy::replace_with_x.
    std::size_t replaced_residues() const noexcept { return replaced_; }
    std::size_t line() const noexcept { return line_no_; }

private:
    FastaReader(std::unique_ptr<std::istream> owned, FastaOptions options)
        : options_(std::move(options)), owned_(std::move(owned)) {
        init_alphabet();
        attach(*owned_);
    }

    void init_alphabet() {
        accepted_.fill(false);
        for (char c : options_.alphabet) {
            if (c == '*' && !options_.allow_stop) continue;
            accepted_[static_cast<unsigned char>(std::toupper(static_cast<unsigned char>(c)))] = true;
        }
    }

    void attach(std::istream& in) {
        in_ = &in;
        if (in.rdbuf() && detail::starts_with_gzip_magic(in.rdbuf())) {
            gzip_ = std::make_unique<detail::GzipStreambuf>(in.rdbuf());
            inflated_ = std::make_unique<std::istream>(gzip_.get());
            in_ = inflated_.get();
        }
    }

    bool read_line() {
        if (!std::getline(*in_, line_)) {
            if (in_->bad()) throw Error("FASTA: read error after line " + std::to_string(line_no_));
            return false;
        }
        ++line_no_;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        return true;
    }

    static bool is_skippable(const std::string& line) {
        if (!line.empty() && line.front() == ';') return true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) return false;
        return true;
    }

    static void split_header(std::string_view text, std::string& id, std::string& description) {
        const auto ws = " \t\v\f";
        const auto id_begin = text.find_first_not_of(ws);
        if (id_begin == std::string_view::npos) return;
        const auto id_end = std::min(text.find_first_of(ws, id_begin), text.size());
        id.assign(text.substr(id_begin, id_end - id_begin));
        const auto desc_begin = text.find_first_not_of(ws, id_end);
        if (desc_begin != std::string_view::npos) description.assign(text.substr(desc_begin));
    }

    FastaOptions options_;
    std::array<bool, 256> accepted_{};
    std::unique_ptr<std::istream> owned_;
    std::unique_ptr<detail::GzipStreambuf> gzip_;
    std::unique_ptr<std::istream> inflated_;
    std::istream* in_ = nullptr;
    std::string line_;
    std::size_t line_no_ = 0;
    std::size_t records_ = 0;
    std::size_t replaced_ = 0;
    bool header_pending_ = false;
};

inline void write_fasta_record(std::ostream& out, const FastaRecord& rec, std::size_t width = 60) {
    out << '>' << rec.id;
    if (!rec.description.empty()) out << ' ' << rec.description;
    out << '\n';
    const std::string_view seq = rec.sequence;
    for (std::size_t pos = 0; pos < seq.size(); pos += width) out << seq.substr(pos, width) << '\n';
}

/// Writes every record, wrapping sequences at `width` columns.
template <std::ranges::input_range Records>
    requires std::convertible_to<std::ranges::range_reference_t<Records>, const FastaRecord&>
void write_fasta(Records&& records, std::ostream& out, std::size_t width = 60) {
    if (width == 0) throw PreconditionError("FASTA line width must be positive");
    std::size_t index = 0;
    for (const FastaRecord& rec : records) {
        write_fasta_record(out, rec, width);
        if (!out) throw Error("FASTA: write failed at record #" + std::to_string(index));
        ++index;
    }
    out.flush();
    if (!out) throw Error("FASTA: flush failed after " + std::to_string(index) + " records");
}

}  // namespace slidealign
