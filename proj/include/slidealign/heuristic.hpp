#pragma once

// Randomized chop-and-slide pairwise alignment.
//
// Each round picks a length fraction for the larger sequence (lf) and the
// smaller one (sf). It then repeatedly cuts a prefix chunk from both working
// sequences, slides the small chunk across the large chunk with an overlap
// of at least one residue, keeps the best shift, and consumes only the
// residues that shift actually used. Trailing residues after the overlap go
// back to their working sequence. When one sequence runs out, the rest of
// the other is appended against gaps. The best of `rounds` rounds wins.
//
// The shift core keeps a handful of scalars and never allocates, so the
// auxiliary space of an alignment is O(1) beyond its output rows.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "slidealign/errors.hpp"
#include "slidealign/rng.hpp"
#include "slidealign/scoring.hpp"
#include "slidealign/sequence.hpp"

namespace slidealign {

/// Rounds, LFactor, SFactor, MinFactor plus the RNG seed.
struct HeuristicParams {
    unsigned rounds = 10;
    double lfactor = 0.5;
    double sfactor = 1.0;
    double minfactor = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (rounds < 1) throw PreconditionError("rounds must be >= 1");
        const auto unit = [](double v) { return v > 0.0 && v <= 1.0; };  // also rejects NaN
        if (!unit(lfactor)) throw PreconditionError("lfactor must lie in (0, 1]");
        if (!unit(sfactor)) throw PreconditionError("sfactor must lie in (0, 1]");
        if (!unit(minfactor)) throw PreconditionError("minfactor must lie in (0, 1]");
    }
};

/// `full` slides the small chunk from one terminal to the other. `contained`
/// is the database-search restriction: only shifts that keep the smaller
/// chunk inside the larger one, so the larger chunk never receives gaps.
enum class ShiftRange { full, contained };

/// Best shift of one chunk pair. `shift` is the offset of the small chunk's
/// first residue relative to the large chunk's first residue.
struct ShiftChoice {
    std::ptrdiff_t shift = 0;
    Score score = 0;
    std::size_t used_large = 0;
    std::size_t used_small = 0;

    bool operator==(const ShiftChoice&) const = default;
};

/// ShiftChoice plus the gapped rows for the used prefixes.
struct ShiftResult : ShiftChoice {
    std::string row_large;
    std::string row_small;
};

/// Called once per evaluated shift with (h, len_large, len_small) of the
/// chunk pair as seen by the shift core.
template <class O>
concept ShiftObserver = std::invocable<O&, std::ptrdiff_t, std::size_t, std::size_t>;

struct NullShiftObserver {
    constexpr void operator()(std::ptrdiff_t, std::size_t, std::size_t) const noexcept {}
};

constexpr std::size_t shift_count(std::size_t len_large, std::size_t len_small) noexcept {
    return len_large + len_small - 1;
}

constexpr std::size_t overlap_length(std::size_t len_large, std::size_t len_small, std::ptrdiff_t h) noexcept {
    const auto L = static_cast<std::ptrdiff_t>(len_large);
    const auto S = static_cast<std::ptrdiff_t>(len_small);
    return static_cast<std::size_t>(std::min(L, h + S) - std::max<std::ptrdiff_t>(h, 0));
}

namespace detail {

inline Score virtual_score(std::string_view large, std::string_view small, std::ptrdiff_t h,
                           const SubstitutionMatrix& matrix, const GapPenalties& gaps) noexcept {
    const std::size_t large_begin = h > 0 ? static_cast<std::size_t>(h) : 0;
    const std::size_t small_begin = h < 0 ? static_cast<std::size_t>(-h) : 0;
    const std::size_t overlap = std::min(large.size() - large_begin, small.size() - small_begin);
    Score score = 0;
    for (std::size_t k = 0; k < overlap; ++k)
        score += matrix.score_unchecked(large[large_begin + k], small[small_begin + k]);
    // Leading overhang is one internal run; trailing overhang is returned unused.
    return score - gaps.internal_run(large_begin + small_begin);
}

inline ShiftChoice make_choice(std::size_t len_large, std::size_t len_small, std::ptrdiff_t h, Score score) noexcept {
    const std::size_t overlap = overlap_length(len_large, len_small, h);
    ShiftChoice c;
    c.shift = h;
    c.score = score;
    c.used_large = h >= 0 ? static_cast<std::size_t>(h) + overlap : overlap;
    c.used_small = overlap + (h < 0 ? static_cast<std::size_t>(-h) : 0);
    return c;
}

/// Indices i in [first, last] map to h = i - len_small + 1. Smallest h wins
/// ties.
template <ShiftObserver Observer>
ShiftChoice best_shift(std::string_view large, std::string_view small, std::size_t first, std::size_t last,
                       const SubstitutionMatrix& matrix, const GapPenalties& gaps, Observer& observe) {
    const auto offset = static_cast<std::ptrdiff_t>(small.size()) - 1;
    std::ptrdiff_t best_h = static_cast<std::ptrdiff_t>(first) - offset;
    Score best = std::numeric_limits<Score>::min();
    for (std::size_t i = first; i <= last; ++i) {
        const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(i) - offset;
        observe(h, large.size(), small.size());
        const Score s = virtual_score(large, small, h, matrix, gaps);
        if (s > best) {
            best = s;
            best_h = h;
        }
    }
    return make_choice(large.size(), small.size(), best_h, best);
}

template <ShiftObserver Observer>
ShiftChoice best_shift_in(ShiftRange range, std::string_view large, std::string_view small,
                          const SubstitutionMatrix& matrix, const GapPenalties& gaps, Observer& observe) {
    if (range == ShiftRange::full)
        return best_shift(large, small, 0, shift_count(large.size(), small.size()) - 1, matrix, gaps, observe);
    if (large.size() >= small.size())
        return best_shift(large, small, small.size() - 1, large.size() - 1, matrix, gaps, observe);
    // The chunk cut from the small sequence is the longer one here: slide the
    // other way and express the result back in the caller's frame.
    const ShiftChoice swapped =
        best_shift(small, large, large.size() - 1, small.size() - 1, matrix, gaps, observe);
    ShiftChoice c;
    c.shift = -swapped.shift;
    c.score = swapped.score;
    c.used_large = swapped.used_small;
    c.used_small = swapped.used_large;
    return c;
}

/// Accumulates the assembled score without materializing rows. Chunks always
/// end in a residue-residue column, so runs never span chunk boundaries: only
/// the first chunk's leading run and the final tail touch the ends.
class ScoreAssembler {
public:
    explicit ScoreAssembler(const GapPenalties& gaps) noexcept : gaps_(gaps) {}

    void chunk(std::string_view, std::string_view, const ShiftChoice& c) noexcept {
        total_ += c.score;
        if (first_) {
            const auto lead = static_cast<std::size_t>(c.shift < 0 ? -c.shift : c.shift);
            total_ += gaps_.internal_run(lead) - gaps_.peripheral_run(lead);
            first_ = false;
        }
    }

    void tail(std::string_view large_rest, std::string_view small_rest) noexcept {
        total_ -= gaps_.peripheral_run(large_rest.size() + small_rest.size());
    }

    Score score() const noexcept { return total_; }

private:
    GapPenalties gaps_;
    Score total_ = 0;
    bool first_ = true;
};

class RowAssembler {
public:
    RowAssembler(std::size_t len_large, std::size_t len_small) {
        row_large_.reserve(len_large + len_small);
        row_small_.reserve(len_large + len_small);
    }

    void chunk(std::string_view large_used, std::string_view small_used, const ShiftChoice& c) {
        if (c.shift >= 0)
            row_small_.append(static_cast<std::size_t>(c.shift), kGap);
        else
            row_large_.append(static_cast<std::size_t>(-c.shift), kGap);
        row_large_ += large_used;
        row_small_ += small_used;
    }

    void tail(std::string_view large_rest, std::string_view small_rest) {
        row_large_ += large_rest;
        row_small_.append(large_rest.size(), kGap);
        row_large_.append(small_rest.size(), kGap);
        row_small_ += small_rest;
    }

    std::string& row_large() noexcept { return row_large_; }
    std::string& row_small() noexcept { return row_small_; }

private:
    std::string row_large_;
    std::string row_small_;
};

inline std::size_t large_chunk_length(std::size_t remaining, double lf) noexcept {
    const auto want = static_cast<std::size_t>(std::ceil(static_cast<double>(remaining) * lf));
    return std::clamp<std::size_t>(want, 1, remaining);
}

inline std::size_t small_chunk_length(std::size_t remaining, double sf, double u) noexcept {
    const auto want = static_cast<std::size_t>(std::llround(static_cast<double>(remaining) * sf * u));
    return std::clamp<std::size_t>(want, 1, remaining);
}

/// One round over validated, non-empty inputs. Every iteration consumes at
/// least one residue from each working sequence.
template <class Assembler, Full64BitGenerator Rng, ShiftObserver Observer>
void chop_and_slide(std::string_view large, std::string_view small, double lf, double sf, Rng& rng,
                    const SubstitutionMatrix& matrix, const GapPenalties& gaps, ShiftRange range, Assembler& out,
                    Observer& observe) {
    while (!large.empty() && !small.empty()) {
        const std::size_t ls = large_chunk_length(large.size(), lf);
        const std::size_t ss = small_chunk_length(small.size(), sf, uniform01(rng));
        const ShiftChoice c = best_shift_in(range, large.substr(0, ls), small.substr(0, ss), matrix, gaps, observe);
        out.chunk(large.substr(0, c.used_large), small.substr(0, c.used_small), c);
        large.remove_prefix(c.used_large);
        small.remove_prefix(c.used_small);
    }
    out.tail(large, small);
}

struct RoundFactors {
    double lf;
    double sf;
};

template <Full64BitGenerator Rng>
RoundFactors draw_factors(const HeuristicParams& params, Rng& rng) noexcept {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return {params.lfactor * std::max(params.minfactor, u1), params.sfactor * std::max(params.minfactor, u2)};
}

inline void require_nonempty(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) throw PreconditionError("cannot align an empty sequence");
}

}  // namespace detail

/// Score of the small sequence placed at shift h against the large one:
/// substitution scores over the overlap minus one internal gap run for the
/// leading overhang. Legal shifts: -(len_small - 1) <= h <= len_large - 1.
inline Score virtual_alignment_score(std::string_view large, std::string_view small, std::ptrdiff_t h,
                                     const SubstitutionMatrix& matrix, const GapPenalties& gaps) {
    detail::require_nonempty(large, small);
    const auto L = static_cast<std::ptrdiff_t>(large.size());
    const auto S = static_cast<std::ptrdiff_t>(small.size());
    if (h < -(S - 1) || h > L - 1)
        throw RangeError("shift " + std::to_string(h) + " outside [" + std::to_string(-(S - 1)) + ", " +
                         std::to_string(L - 1) + "]");
    matrix.validate(large);
    matrix.validate(small);
    return detail::virtual_score(large, small, h, matrix, gaps);
}

inline Score virtual_alignment_score(const AminoAcidSequence& large, const AminoAcidSequence& small, std::ptrdiff_t h,
                                     const SubstitutionMatrix& matrix, const GapPenalties& gaps) {
    return virtual_alignment_score(large.view(), small.view(), h, matrix, gaps);
}

/// Evaluates every i in [start, end] (h = i - len_small + 1) and returns the
/// best shift with its used prefixes and chunk rows.
inline ShiftResult best_subsequence_alignment(std::string_view large, std::string_view small, std::size_t start,
                                              std::size_t end, const SubstitutionMatrix& matrix,
                                              const GapPenalties& gaps) {
    detail::require_nonempty(large, small);
    if (start > end) throw RangeError("start index exceeds end index");
    const std::size_t n = shift_count(large.size(), small.size());
    if (end > n - 1) throw RangeError("end index " + std::to_string(end) + " exceeds " + std::to_string(n - 1));
    matrix.validate(large);
    matrix.validate(small);
    NullShiftObserver none;
    ShiftResult r{detail::best_shift(large, small, start, end, matrix, gaps, none), {}, {}};
    detail::RowAssembler rows(r.used_large, r.used_small);
    rows.chunk(large.substr(0, r.used_large), small.substr(0, r.used_small), r);
    r.row_large = std::move(rows.row_large());
    r.row_small = std::move(rows.row_small());
    return r;
}

inline ShiftResult best_subsequence_alignment(const AminoAcidSequence& large, const AminoAcidSequence& small,
                                              std::size_t start, std::size_t end, const SubstitutionMatrix& matrix,
                                              const GapPenalties& gaps) {
    return best_subsequence_alignment(large.view(), small.view(), start, end, matrix, gaps);
}

/// Full-range overload.
inline ShiftResult best_subsequence_alignment(const AminoAcidSequence& large, const AminoAcidSequence& small,
                                              const SubstitutionMatrix& matrix, const GapPenalties& gaps) {
    return best_subsequence_alignment(large, small, 0, shift_count(large.size(), small.size()) - 1, matrix, gaps);
}

/// One chop-and-slide round with fixed factors. Rows are (large, small); the
/// score is recomputed from the assembled rows.
template <Full64BitGenerator Rng>
Alignment align_one_round(std::string_view large, std::string_view small, double lf, double sf, Rng& rng,
                          const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                          ShiftRange range = ShiftRange::full) {
    detail::require_nonempty(large, small);
    if (!(lf > 0.0 && lf <= 1.0) || !(sf > 0.0 && sf <= 1.0)) throw PreconditionError("lf and sf must lie in (0, 1]");
    gaps.validate();
    matrix.validate(large);
    matrix.validate(small);
    detail::RowAssembler rows(large.size(), small.size());
    NullShiftObserver none;
    detail::chop_and_slide(large, small, lf, sf, rng, matrix, gaps, range, rows, none);
    Alignment aln{std::move(rows.row_large()), std::move(rows.row_small()), 0};
    aln.score = score_alignment(aln, matrix, gaps);
    return aln;
}

template <Full64BitGenerator Rng>
Alignment align_one_round(const AminoAcidSequence& large, const AminoAcidSequence& small, double lf, double sf,
                          Rng& rng, const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                          ShiftRange range = ShiftRange::full) {
    return align_one_round(large.view(), small.view(), lf, sf, rng, matrix, gaps, range);
}

/// Result of align_sequences. Rows follow the argument order (row_a for the
/// first sequence), whichever of the two acted as "large".
struct HeuristicAlignment {
    Alignment alignment;
    unsigned round = 0;  // 0-based index of the winning round
    double lfactor = 0;  // effective factors drawn for that round
    double sfactor = 0;
    std::uint64_t seed = 0;
};

namespace detail {

struct RoundPick {
    Score score = std::numeric_limits<Score>::min();
    unsigned round = 0;
    RoundFactors factors{};
    SplitMix64 rng_state{0};
};

/// Runs all rounds score-only; the longer input (first on ties) is "large".
template <ShiftObserver Observer>
RoundPick best_round(std::string_view large, std::string_view small, const HeuristicParams& params,
                     const SubstitutionMatrix& matrix, const GapPenalties& gaps, ShiftRange range,
                     Observer& observe) {
    SplitMix64 rng(params.seed);
    RoundPick best;
    for (unsigned r = 0; r < params.rounds; ++r) {
        const RoundFactors f = draw_factors(params, rng);
        const SplitMix64 start_state = rng;
        ScoreAssembler total(gaps);
        chop_and_slide(large, small, f.lf, f.sf, rng, matrix, gaps, range, total, observe);
        if (r == 0 || total.score() > best.score) best = {total.score(), r, f, start_state};
    }
    return best;
}

inline void check_inputs(std::string_view a, std::string_view b, const HeuristicParams& params,
                         const SubstitutionMatrix& matrix, const GapPenalties& gaps) {
    require_nonempty(a, b);
    params.validate();
    gaps.validate();
    matrix.validate(a);
    matrix.validate(b);
}

}  // namespace detail

/// Best-of-`rounds` heuristic alignment. Deterministic for a given seed.
inline HeuristicAlignment align_sequences(std::string_view a, std::string_view b, const HeuristicParams& params,
                                          const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                                          ShiftRange range = ShiftRange::full) {
    detail::check_inputs(a, b, params, matrix, gaps);
    const bool a_is_large = a.size() >= b.size();
    const std::string_view large = a_is_large ? a : b;
    const std::string_view small = a_is_large ? b : a;

    NullShiftObserver none;
    const detail::RoundPick pick = detail::best_round(large, small, params, matrix, gaps, range, none);

    SplitMix64 replay = pick.rng_state;
    detail::RowAssembler rows(large.size(), small.size());
    detail::chop_and_slide(large, small, pick.factors.lf, pick.factors.sf, replay, matrix, gaps, range, rows, none);

    HeuristicAlignment out;
    out.alignment.row_a = std::move(a_is_large ? rows.row_large() : rows.row_small());
    out.alignment.row_b = std::move(a_is_large ? rows.row_small() : rows.row_large());
    out.alignment.score = score_alignment(out.alignment, matrix, gaps);
    assert(out.alignment.score == pick.score);
    out.round = pick.round;
    out.lfactor = pick.factors.lf;
    out.sfactor = pick.factors.sf;
    out.seed = params.seed;
    return out;
}

inline HeuristicAlignment align_sequences(const AminoAcidSequence& a, const AminoAcidSequence& b,
                                          const HeuristicParams& params, const SubstitutionMatrix& matrix,
                                          const GapPenalties& gaps, ShiftRange range = ShiftRange::full) {
    return align_sequences(a.view(), b.view(), params, matrix, gaps, range);
}

/// Score of align_sequences without building rows; allocation-free.
template <ShiftObserver Observer = NullShiftObserver>
Score heuristic_score(std::string_view a, std::string_view b, const HeuristicParams& params,
                      const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                      ShiftRange range = ShiftRange::full, Observer&& observe = {}) {
    detail::check_inputs(a, b, params, matrix, gaps);
    const bool a_is_large = a.size() >= b.size();
    return detail::best_round(a_is_large ? a : b, a_is_large ? b : a, params, matrix, gaps, range, observe).score;
}

}  // namespace slidealign
