#pragma once

// Optimal affine-gap alignment (Gotoh's three-state dynamic programming).
// Quadratic time and space; meant as a correctness and quality yardstick for
// the heuristic, not for database-scale work.
//
// Modes:
//   global      every residue aligned; exactly score_alignment's rules, so end
//               runs cost pgp per column and inner runs gop + gep*(len-1).
//   semiglobal  as global but end runs are free.
//   local       Smith-Waterman: best-scoring pair of substrings, score >= 0.
//               The rows cover only the aligned substrings (empty when no
//               positive-scoring pair exists).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "slidealign/errors.hpp"
#include "slidealign/scoring.hpp"
#include "slidealign/sequence.hpp"

namespace slidealign {

enum class ReferenceMode { global, semiglobal, local };

namespace detail {

class GotohTables {
public:
    GotohTables(std::size_t rows, std::size_t cols)
        : cols_(cols), m_(rows * cols, kMinusInf), x_(rows * cols, kMinusInf), y_(rows * cols, kMinusInf) {}

    static constexpr Score kMinusInf = std::numeric_limits<Score>::min() / 4;

    Score& m(std::size_t i, std::size_t j) { return m_[i * cols_ + j]; }
    Score& x(std::size_t i, std::size_t j) { return x_[i * cols_ + j]; }
    Score& y(std::size_t i, std::size_t j) { return y_[i * cols_ + j]; }

private:
    std::size_t cols_;
    std::vector<Score> m_;  // column pairs a[i-1] with b[j-1]
    std::vector<Score> x_;  // column pairs b[j-1] with a gap (row a gapped)
    std::vector<Score> y_;  // column pairs a[i-1] with a gap (row b gapped)
};

}  // namespace detail

inline Alignment optimal_align(std::string_view a, std::string_view b, const SubstitutionMatrix& matrix,
                               const GapPenalties& gaps, ReferenceMode mode = ReferenceMode::global) {
    if (a.empty() || b.empty()) throw PreconditionError("cannot align an empty sequence");
    gaps.validate();
    matrix.validate(a);
    matrix.validate(b);

    using detail::GotohTables;
    constexpr Score NEG = GotohTables::kMinusInf;
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const bool local = mode == ReferenceMode::local;
    const Score end_cost = mode == ReferenceMode::global ? gaps.pgp : 0;

    // A run of gaps in row a sits at a fixed i; it touches an end of the
    // alignment exactly when i == 0 or i == n (likewise j for row b).
    const auto open_x = [&](std::size_t i) -> Score { return !local && (i == 0 || i == n) ? end_cost : gaps.gop; };
    const auto ext_x = [&](std::size_t i) -> Score { return !local && (i == 0 || i == n) ? end_cost : gaps.gep; };
    const auto open_y = [&](std::size_t j) -> Score { return !local && (j == 0 || j == m) ? end_cost : gaps.gop; };
    const auto ext_y = [&](std::size_t j) -> Score { return !local && (j == 0 || j == m) ? end_cost : gaps.gep; };

    GotohTables t(n + 1, m + 1);
    t.m(0, 0) = 0;
    Score best_local = 0;
    std::size_t best_i = 0, best_j = 0;

    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j <= m; ++j) {
            if (i > 0 && j > 0) {
                Score prev = std::max({t.m(i - 1, j - 1), t.x(i - 1, j - 1), t.y(i - 1, j - 1)});
                if (local) prev = std::max<Score>(prev, 0);
                if (prev > NEG) t.m(i, j) = prev + matrix.score_unchecked(a[i - 1], b[j - 1]);
                if (local && t.m(i, j) > best_local) {
                    best_local = t.m(i, j);
                    best_i = i;
                    best_j = j;
                }
            }
            if (j > 0) {
                const Score open = std::max(t.m(i, j - 1), t.y(i, j - 1));
                Score v = NEG;
                if (open > NEG) v = open - open_x(i);
                if (t.x(i, j - 1) > NEG) v = std::max(v, t.x(i, j - 1) - ext_x(i));
                t.x(i, j) = v;
            }
            if (i > 0) {
                const Score open = std::max(t.m(i - 1, j), t.x(i - 1, j));
                Score v = NEG;
                if (open > NEG) v = open - open_y(j);
                if (t.y(i - 1, j) > NEG) v = std::max(v, t.y(i - 1, j) - ext_y(j));
                t.y(i, j) = v;
            }
        }
    }

    enum class State { match, gap_in_a, gap_in_b };
    std::size_t i = n, j = m;
    State state = State::match;
    Score score = 0;
    if (local) {
        if (best_local <= 0) return Alignment{{}, {}, 0};
        i = best_i;
        j = best_j;
        score = best_local;
    } else {
        score = std::max({t.m(n, m), t.x(n, m), t.y(n, m)});
        state = score == t.m(n, m) ? State::match : score == t.x(n, m) ? State::gap_in_a : State::gap_in_b;
    }

    std::string row_a, row_b;
    while (i > 0 || j > 0) {
        if (state == State::match) {
            row_a += a[i - 1];
            row_b += b[j - 1];
            const Score prev = t.m(i, j) - matrix.score_unchecked(a[i - 1], b[j - 1]);
            --i;
            --j;
            if (local && prev == 0) break;
            if (i == 0 && j == 0) break;
            state = prev == t.m(i, j) ? State::match : prev == t.x(i, j) ? State::gap_in_a : State::gap_in_b;
        } else if (state == State::gap_in_a) {
            row_a += kGap;
            row_b += b[j - 1];
            const Score cur = t.x(i, j);
            --j;
            if (j > 0 && cur == t.x(i, j) - ext_x(i)) continue;
            if (cur == t.m(i, j) - open_x(i))
                state = State::match;
            else
                state = State::gap_in_b;
            if (i == 0 && j == 0) break;
        } else {
            row_a += a[i - 1];
            row_b += kGap;
            const Score cur = t.y(i, j);
            --i;
            if (i > 0 && cur == t.y(i, j) - ext_y(j)) continue;
            if (cur == t.m(i, j) - open_y(j))
                state = State::match;
            else
                state = State::gap_in_a;
            if (i == 0 && j == 0) break;
        }
    }
    std::reverse(row_a.begin(), row_a.end());
    std::reverse(row_b.begin(), row_b.end());
    return Alignment{std::move(row_a), std::move(row_b), score};
}

inline Alignment optimal_align(const AminoAcidSequence& a, const AminoAcidSequence& b,
                               const SubstitutionMatrix& matrix, const GapPenalties& gaps,
                               ReferenceMode mode = ReferenceMode::global) {
    return optimal_align(a.view(), b.view(), matrix, gaps, mode);
}

}  // namespace slidealign
