#pragma once

// Substitution matrices, gap penalties and affine scoring of gapped
// alignments.
//
// Gap-run cost convention, shared by every aligner in this library:
//
//   * a run touching the first or last column of the alignment is
//     peripheral and costs  pgp * length;
//   * any other run is internal and costs  gop + gep * (length - 1),
//     i.e. the first column pays the opening penalty alone.
//
// Runs are maximal stretches of gaps in one row. A gap in row A next to a
// gap in row B forms two separate runs.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slidealign/blosum62.hpp"
#include "slidealign/errors.hpp"

namespace slidealign {

using Score = std::int64_t;

inline constexpr char kGap = '-';

class SubstitutionMatrix {
public:
    /// `scores` is row-major, alphabet.size() squared entries. Letters are
    /// case-insensitive; the matrix must be symmetric.
    SubstitutionMatrix(std::string_view alphabet, std::span<const int> scores, std::string name = {})
        : alphabet_(alphabet), scores_(scores.begin(), scores.end()), name_(std::move(name)) {
        const std::size_t n = alphabet_.size();
        if (n == 0) throw Error("substitution matrix: empty alphabet");
        if (scores_.size() != n * n)
            throw Error("substitution matrix: expected " + std::to_string(n * n) + " scores, got " +
                        std::to_string(scores_.size()));
        index_.fill(kAbsent);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<unsigned char>(alphabet_[i]);
            if (c >= 128 || c == static_cast<unsigned char>(kGap) || std::isspace(c) || !std::isgraph(c))
                throw Error(std::string("substitution matrix: illegal alphabet symbol '") + alphabet_[i] + "'");
            const auto upper = static_cast<char>(std::toupper(c));
            alphabet_[i] = upper;
            if (index_[static_cast<unsigned char>(upper)] != kAbsent)
                throw Error(std::string("substitution matrix: duplicate symbol '") + upper + "'");
            index_[static_cast<unsigned char>(upper)] = static_cast<std::uint8_t>(i);
            index_[static_cast<unsigned char>(std::tolower(upper))] = static_cast<std::uint8_t>(i);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (scores_[i * n + j] != scores_[j * n + i])
                    throw Error(std::string("substitution matrix: not symmetric at (") + alphabet_[i] + "," +
                                alphabet_[j] + ")");

        table_.assign(128 * 128, 0);
        for (int a = 0; a < 128; ++a) {
            if (index_[a] == kAbsent) continue;
            for (int b = 0; b < 128; ++b) {
                if (index_[b] == kAbsent) continue;
                table_[(a << 7) | b] = scores_[index_[a] * n + index_[b]];
            }
        }
        const auto [lo, hi] = std::minmax_element(scores_.begin(), scores_.end());
        min_ = *lo;
        max_ = *hi;
    }

    /// The compiled-in NCBI BLOSUM62 (with B, Z, X, *).
    static const SubstitutionMatrix& blosum62() {
        static const SubstitutionMatrix m = [] {
            std::istringstream in{std::string(detail::kBlosum62Text)};
            return parse_ncbi(in, "BLOSUM62");
        }();
        return m;
    }

    /// Reads the NCBI text layout: `#` comments, a header row of residue
    /// symbols, then one labelled row of integers per symbol.
    static SubstitutionMatrix parse_ncbi(std::istream& in, std::string name = {}) {
        std::string line;
        std::string header;
        std::vector<int> scores;
        std::string row_labels;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream fields(line);
            if (header.empty()) {
                std::string tok;
                while (fields >> tok) {
                    if (tok.size() != 1) throw Error("matrix line " + std::to_string(line_no) + ": bad header token '" + tok + "'");
                    header += tok[0];
                }
                continue;
            }
            std::string label;
            fields >> label;
            if (label.size() != 1) throw Error("matrix line " + std::to_string(line_no) + ": bad row label '" + label + "'");
            row_labels += label[0];
            std::size_t count = 0;
            int v = 0;
            while (fields >> v) {
                scores.push_back(v);
                ++count;
            }
            if (!fields.eof() || count != header.size())
                throw Error("matrix line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " integer scores");
        }
        if (header.empty()) throw Error("matrix: no header row");
        if (row_labels.size() != header.size()) throw Error("matrix: row count does not match header");
        // Rows may come in any order; reorder to header order.
        const std::size_t n = header.size();
        std::vector<int> ordered(n * n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto pos = header.find(row_labels[r]);
            if (pos == std::string::npos) throw Error(std::string("matrix: row label '") + row_labels[r] + "' not in header");
            std::copy_n(scores.begin() + static_cast<std::ptrdiff_t>(r * n), n,
                        ordered.begin() + static_cast<std::ptrdiff_t>(pos * n));
        }
        return SubstitutionMatrix(header, ordered, std::move(name));
    }

    static SubstitutionMatrix load_ncbi(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open matrix file " + path.string());
        return parse_ncbi(in, path.filename().string());
    }

    bool contains(char c) const noexcept {
        return index_[static_cast<unsigned char>(c)] != kAbsent;
    }

    /// Checked lookup; lowercase letters are accepted.
    int score(char a, char b) const {
        if (!contains(a)) throw AlphabetError(a, "matrix " + name_);
        if (!contains(b)) throw AlphabetError(b, "matrix " + name_);
        return score_unchecked(a, b);
    }

    /// Both residues must satisfy contains().
    int score_unchecked(char a, char b) const noexcept {
        return table_[(static_cast<unsigned>(a) << 7) | static_cast<unsigned>(b)];
    }

    /// Throws AlphabetError on the first residue not in the alphabet.
    void validate(std::string_view residues, const std::string& context = {}) const {
        for (char c : residues)
            if (!contains(c)) throw AlphabetError(c, context.empty() ? "matrix " + name_ : context);
    }

    std::string_view alphabet() const noexcept { return alphabet_; }
    const std::string& name() const noexcept { return name_; }
    int min_score() const noexcept { return min_; }
    int max_score() const noexcept { return max_; }

private:
    static constexpr std::uint8_t kAbsent = 0xff;

    std::string alphabet_;
    std::vector<int> scores_;
    std::string name_;
    std::array<std::uint8_t, 256> index_{};
    std::vector<std::int16_t> table_;
    int min_ = 0;
    int max_ = 0;
};

/// Gap penalties, subtracted from the score. Defaults are PGP=0, GOP=10,
/// GEP=5.
struct GapPenalties {
    int pgp = 0;
    int gop = 10;
    int gep = 5;

    void validate() const {
        if (pgp < 0 || gop < 0 || gep < 0) throw PreconditionError("gap penalties must be non-negative");
        if (gop < gep) throw PreconditionError("gap opening penalty must be >= gap extension penalty");
    }

    constexpr Score internal_run(std::size_t length) const noexcept {
        return length == 0 ? 0 : gop + static_cast<Score>(gep) * static_cast<Score>(length - 1);
    }
    constexpr Score peripheral_run(std::size_t length) const noexcept {
        return static_cast<Score>(pgp) * static_cast<Score>(length);
    }
};

struct Alignment {
    std::string row_a;
    std::string row_b;
    Score score = 0;

    bool operator==(const Alignment&) const = default;
};

/// Removes gap characters.
inline std::string ungapped(std::string_view row) {
    std::string out;
    out.reserve(row.size());
    for (char c : row)
        if (c != kGap) out += c;
    return out;
}

/// Throws StructureError unless the rows have equal length and no column is
/// gap/gap.
inline void check_structure(std::string_view row_a, std::string_view row_b) {
    if (row_a.size() != row_b.size())
        throw StructureError("alignment rows differ in length (" + std::to_string(row_a.size()) + " vs " +
                             std::to_string(row_b.size()) + ")");
    for (std::size_t i = 0; i < row_a.size(); ++i)
        if (row_a[i] == kGap && row_b[i] == kGap)
            throw StructureError("alignment column " + std::to_string(i) + " has a gap in both rows");
}

inline Score score_alignment(std::string_view row_a, std::string_view row_b, const SubstitutionMatrix& matrix,
                             const GapPenalties& gaps) {
    check_structure(row_a, row_b);
    const std::size_t n = row_a.size();
    Score total = 0;
    std::size_t col = 0;
    while (col < n) {
        if (row_a[col] != kGap && row_b[col] != kGap) {
            total += matrix.score(row_a[col], row_b[col]);
            ++col;
            continue;
        }
        const std::string_view gapped = row_a[col] == kGap ? row_a : row_b;
        const std::string_view other = row_a[col] == kGap ? row_b : row_a;
        const std::size_t start = col;
        while (col < n && gapped[col] == kGap) {
            if (!matrix.contains(other[col])) throw AlphabetError(other[col], "alignment column " + std::to_string(col));
            ++col;
        }
        const std::size_t len = col - start;
        total -= (start == 0 || col == n) ? gaps.peripheral_run(len) : gaps.internal_run(len);
    }
    return total;
}

inline Score score_alignment(const Alignment& aln, const SubstitutionMatrix& matrix, const GapPenalties& gaps) {
    return score_alignment(aln.row_a, aln.row_b, matrix, gaps);
}

}  // namespace slidealign
