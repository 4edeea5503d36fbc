#pragma once

// Database search: one search-mode alignment (a single round, contained
// shift range) per record, threshold filter, ranking.
//
// A reader stage pulls records from the source and hands batches to worker
// threads. Each record's RNG seed is derived from (seed, ordinal), and ties
// are ranked by database order, so the output does not depend on the number
// of workers or on scheduling.

#include <algorithm>
#include <atomic>
#include <concepts>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "slidealign/errors.hpp"
#include "slidealign/fasta.hpp"
#include "slidealign/heuristic.hpp"
#include "slidealign/rng.hpp"
#include "slidealign/scoring.hpp"
#include "slidealign/sequence.hpp"

namespace slidealign {

struct SearchConfig {
    Score threshold = 0;
    std::optional<std::size_t> max_hits;
    HeuristicParams params{.rounds = 1};  // rounds is forced to 1 when searching
    GapPenalties gaps;
    unsigned workers = 1;
    bool keep_alignments = false;
    std::size_t batch_size = 64;
};

struct SearchHit {
    std::string record_id;
    std::string description;
    Score score = 0;
    std::size_t rank = 0;     // 1-based
    std::size_t ordinal = 0;  // 0-based position in the database
    std::optional<Alignment> alignment;  // rows: query, record
};

struct SearchReport {
    std::vector<SearchHit> hits;
    std::size_t records = 0;  // records read, including skipped ones
    std::size_t skipped = 0;  // records rejected for alphabet reasons
};

/// Anything with `std::optional<FastaRecord> next()`. A source may throw
/// InvalidRecordError for a single bad record and keep going afterwards.
template <class S>
concept RecordSource = requires(S& s) {
    { s.next() } -> std::same_as<std::optional<FastaRecord>>;
};

/// In-memory record source.
class SpanSource {
public:
    explicit SpanSource(std::span<const FastaRecord> records) : records_(records) {}

    std::optional<FastaRecord> next() {
        if (pos_ == records_.size()) return std::nullopt;
        return records_[pos_++];
    }

private:
    std::span<const FastaRecord> records_;
    std::size_t pos_ = 0;
};

inline HeuristicParams search_params(const SearchConfig& config, std::uint64_t seed) {
    HeuristicParams p = config.params;
    p.rounds = 1;
    p.seed = seed;
    return p;
}

/// Search-mode score of one pair using config.params.seed. The longer
/// sequence acts as "large" (the query on ties).
template <ShiftObserver Observer = NullShiftObserver>
Score search_align(std::string_view query, std::string_view subject, const SearchConfig& config,
                   const SubstitutionMatrix& matrix, Observer&& observe = {}) {
    return heuristic_score(query, subject, search_params(config, config.params.seed), matrix, config.gaps,
                           ShiftRange::contained, observe);
}

inline Score search_align(const AminoAcidSequence& query, const AminoAcidSequence& subject,
                          const SearchConfig& config, const SubstitutionMatrix& matrix) {
    return search_align(query.view(), subject.view(), config, matrix);
}

namespace detail {

template <class T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    bool push(T item) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
        if (closed_) return false;
        items_.push_back(std::move(item));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::size_t capacity_;
    std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> items_;
    bool closed_ = false;
};

struct Job {
    std::size_t ordinal;
    FastaRecord record;
};

inline bool ranks_before(const SearchHit& a, const SearchHit& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.ordinal < b.ordinal;
}

}  // namespace detail

/// Scores every record, keeps those with score >= threshold and ranks them
/// by descending score, database order breaking ties.
template <RecordSource Source>
SearchReport search_database(const AminoAcidSequence& query, Source& db, const SearchConfig& config,
                             const SubstitutionMatrix& matrix) {
    config.gaps.validate();
    search_params(config, config.params.seed).validate();
    matrix.validate(query.view(), "query");
    const unsigned workers = std::max(1u, config.workers);
    const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);

    detail::BoundedQueue<std::vector<detail::Job>> queue(2 * static_cast<std::size_t>(workers));
    std::vector<std::vector<SearchHit>> found(workers);
    std::vector<std::exception_ptr> failures(workers);
    std::atomic<std::size_t> skipped{0};

    const auto work = [&](unsigned w) {
        try {
            while (auto batch = queue.pop()) {
                for (detail::Job& job : *batch) {
                    const std::string_view subject = job.record.sequence;
                    bool valid = !subject.empty();
                    for (char c : subject) valid = valid && matrix.contains(c);
                    if (!valid) {
                        skipped.fetch_add(1, std::memory_order_relaxed);
                        continue;
                    }
                    const std::uint64_t seed = derive_seed(config.params.seed, job.ordinal);
                    const HeuristicParams params = search_params(config, seed);
                    const Score score = heuristic_score(query.view(), subject, params, matrix, config.gaps,
                                                        ShiftRange::contained);
                    if (score < config.threshold) continue;
                    SearchHit hit;
                    hit.record_id = std::move(job.record.id);
                    hit.description = std::move(job.record.description);
                    hit.score = score;
                    hit.ordinal = job.ordinal;
                    if (config.keep_alignments) {
                        HeuristicAlignment h =
                            align_sequences(query.view(), subject, params, matrix, config.gaps, ShiftRange::contained);
                        hit.alignment = std::move(h.alignment);
                    }
                    found[w].push_back(std::move(hit));
                }
            }
        } catch (...) {
            failures[w] = std::current_exception();
            queue.close();
        }
    };

    SearchReport report;
    std::exception_ptr reader_failure;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);

        try {
            std::vector<detail::Job> batch;
            batch.reserve(batch_size);
            std::size_t ordinal = 0;
            while (true) {
                std::optional<FastaRecord> rec;
                try {
                    rec = db.next();
                } catch (const InvalidRecordError&) {
                    ++ordinal;
                    skipped.fetch_add(1, std::memory_order_relaxed);
                    continue;
                }
                if (!rec) break;
                batch.push_back({ordinal++, std::move(*rec)});
                if (batch.size() == batch_size) {
                    if (!queue.push(std::move(batch))) break;
                    batch = {};
                    batch.reserve(batch_size);
                }
            }
            if (!batch.empty()) queue.push(std::move(batch));
            report.records = ordinal;
        } catch (...) {
            reader_failure = std::current_exception();
        }
        queue.close();
    }
    if (reader_failure) std::rethrow_exception(reader_failure);
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    for (auto& part : found)
        for (auto& hit : part) report.hits.push_back(std::move(hit));
    std::sort(report.hits.begin(), report.hits.end(), detail::ranks_before);
    if (config.max_hits && report.hits.size() > *config.max_hits) report.hits.resize(*config.max_hits);
    for (std::size_t i = 0; i < report.hits.size(); ++i) report.hits[i].rank = i + 1;
    report.skipped = skipped.load();
    return report;
}

/// TSV lines `rank  id  score  description`; with alignments, each hit is
/// followed by two `#`-prefixed rows (query, record).
inline void write_hits_tsv(std::ostream& out, const std::vector<SearchHit>& hits, bool show_alignments = false) {
    for (const SearchHit& hit : hits) {
        out << hit.rank << '\t' << hit.record_id << '\t' << hit.score << '\t' << hit.description << '\n';
        if (show_alignments && hit.alignment) {
            out << "#\t" << hit.alignment->row_a << '\n';
            out << "#\t" << hit.alignment->row_b << '\n';
        }
    }
}

}  // namespace slidealign
