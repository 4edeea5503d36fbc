// slidealign command line: align, search, bench.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "alloc_probe.hpp"
#include "slidealign/slidealign.hpp"

namespace sa = slidealign;

namespace {

constexpr std::string_view kStandard = "ACDEFGHIKLMNPQRSTVWY";

struct Common {
    sa::GapPenalties gaps;
    sa::HeuristicParams params;
    std::optional<std::uint64_t> seed;
    std::string matrix_path;

    void add_to(CLI::App& app, bool with_rounds) {
        app.add_option("--pgp", gaps.pgp, "PGP: peripheral gap penalty per residue")->capture_default_str();
        app.add_option("--gop", gaps.gop, "GOP: internal gap open penalty")->capture_default_str();
        app.add_option("--gep", gaps.gep, "GEP: internal gap extension penalty")->capture_default_str();
        if (with_rounds) app.add_option("--rounds", params.rounds, "Rounds")->capture_default_str();
        app.add_option("--lfactor", params.lfactor, "LFactor: large chunk fraction")->capture_default_str();
        app.add_option("--sfactor", params.sfactor, "SFactor: small chunk fraction")->capture_default_str();
        app.add_option("--minfactor", params.minfactor, "MinFactor: floor for the per-round draw")
            ->capture_default_str();
        app.add_option("--seed", seed, "RNG seed (random if omitted; always reported)");
        app.add_option("--matrix", matrix_path, "NCBI-format substitution matrix (default BLOSUM62)");
    }

    std::uint64_t resolved_seed() {
        if (!seed) {
            std::random_device rd;
            seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
        return *seed;
    }

    sa::SubstitutionMatrix matrix() const {
        return matrix_path.empty() ? sa::SubstitutionMatrix::blosum62() : sa::SubstitutionMatrix::load_ncbi(matrix_path);
    }
};

unsigned default_threads() {
    if (const char* env = std::getenv("SLIDEALIGN_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring SLIDEALIGN_THREADS=" << env << "\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

sa::FastaRecord first_record(const std::string& path, const sa::FastaOptions& opts) {
    sa::FastaReader reader = sa::FastaReader::open(path, opts);
    auto rec = reader.next();
    if (!rec) throw sa::Error("no records in " + path);
    return std::move(*rec);
}

// --- align ---------------------------------------------------------------

struct AlignArgs {
    Common common;
    std::string a, b, a_fasta, b_fasta;
    bool exact = false;
    std::string exact_mode = "global";
};

int run_align(AlignArgs& args) {
    const auto matrix = args.common.matrix();
    const std::string a_raw = args.a_fasta.empty() ? args.a : first_record(args.a_fasta, {}).sequence;
    const std::string b_raw = args.b_fasta.empty() ? args.b : first_record(args.b_fasta, {}).sequence;
    const sa::AminoAcidSequence a(a_raw, matrix, "a");
    const sa::AminoAcidSequence b(b_raw, matrix, "b");

    sa::HeuristicParams params = args.common.params;
    params.seed = args.common.resolved_seed();
    const auto result = sa::align_sequences(a, b, params, matrix, args.common.gaps);

    std::cout << "seed\t" << params.seed << '\n'
              << "round\t" << result.round + 1 << '/' << params.rounds << '\n'
              << "lfactor\t" << result.lfactor << '\n'
              << "sfactor\t" << result.sfactor << '\n'
              << "score\t" << result.alignment.score << '\n'
              << "a\t" << result.alignment.row_a << '\n'
              << "b\t" << result.alignment.row_b << '\n';

    if (args.exact) {
        sa::ReferenceMode mode = sa::ReferenceMode::global;
        if (args.exact_mode == "semiglobal") mode = sa::ReferenceMode::semiglobal;
        if (args.exact_mode == "local") mode = sa::ReferenceMode::local;
        const auto opt = sa::optimal_align(a, b, matrix, args.common.gaps, mode);
        std::cout << "exact_mode\t" << args.exact_mode << '\n'
                  << "exact_score\t" << opt.score << '\n'
                  << "exact_a\t" << opt.row_a << '\n'
                  << "exact_b\t" << opt.row_b << '\n'
                  << "score_gap\t" << opt.score - result.alignment.score << '\n';
    }
    return 0;
}

// --- search --------------------------------------------------------------

struct SearchArgs {
    Common common;
    std::string query, query_seq, db, output;
    sa::Score threshold = 0;
    std::optional<std::size_t> max_hits;
    unsigned threads = 0;
    bool show_alignments = false;
    std::string invalid = "reject";
    bool strict_stop = false;
};

int run_search(SearchArgs& args) {
    const auto matrix = args.common.matrix();
    sa::FastaOptions opts;
    opts.policy = args.invalid == "replace" ? sa::ResiduePolicy::replace_with_x : sa::ResiduePolicy::reject;
    opts.allow_stop = !args.strict_stop;

    const sa::FastaRecord q = args.query_seq.empty() ? first_record(args.query, opts)
                                                     : sa::FastaRecord{"query", "", args.query_seq};
    const sa::AminoAcidSequence query(q.sequence, matrix, q.id, q.description);

    sa::SearchConfig config;
    config.threshold = args.threshold;
    config.max_hits = args.max_hits;
    config.params = args.common.params;
    config.params.seed = args.common.resolved_seed();
    config.gaps = args.common.gaps;
    config.workers = args.threads ? args.threads : default_threads();
    config.keep_alignments = args.show_alignments;

    sa::FastaReader db = sa::FastaReader::open(args.db, opts);
    const auto t0 = std::chrono::steady_clock::now();
    const sa::SearchReport report = sa::search_database(query, db, config, matrix);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

    if (args.output.empty()) {
        sa::write_hits_tsv(std::cout, report.hits, args.show_alignments);
        std::cout.flush();
        if (!std::cout) throw sa::Error("failed writing results to stdout");
    } else {
        std::ofstream out(args.output);
        if (!out) throw sa::Error("cannot open output file " + args.output);
        sa::write_hits_tsv(out, report.hits, args.show_alignments);
        out.close();
        if (!out) throw sa::Error("failed writing " + args.output);
    }

    std::cerr << "records\t" << report.records << "\tskipped\t" << report.skipped << "\thits\t"
              << report.hits.size() << "\tseconds\t" << std::fixed << std::setprecision(3) << elapsed.count()
              << "\tseed\t" << config.params.seed << "\tthreads\t" << config.workers << '\n';
    if (db.replaced_residues() > 0) std::cerr << "replaced residues\t" << db.replaced_residues() << '\n';
    return report.hits.empty() ? 1 : 0;
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
    Common common;
    std::vector<std::size_t> sizes{2500, 5000, 10000};
    std::size_t query_length = 30;
    std::size_t record_length = 300;
    unsigned threads = 1;
    sa::Score threshold = 20;
    unsigned repeats = 1;
    std::size_t probe_records = 200;
};

std::string random_protein(sa::SplitMix64& rng, std::size_t n) {
    std::string s(n, 'A');
    for (char& c : s) c = kStandard[rng() % kStandard.size()];
    return s;
}

int run_bench(BenchArgs& args) {
    const auto matrix = args.common.matrix();
    const std::uint64_t seed = args.common.resolved_seed();
    if (args.query_length == 0 || args.record_length == 0) throw sa::PreconditionError("lengths must be positive");

    sa::SplitMix64 rng(seed);
    const sa::AminoAcidSequence query(random_protein(rng, args.query_length), matrix, "query");

    sa::SearchConfig config;
    config.threshold = args.threshold;
    config.params = args.common.params;
    config.params.seed = seed;
    config.gaps = args.common.gaps;
    config.workers = std::max(1u, args.threads);

    std::cout << "n,m,record_length,wall_seconds,hits,aux_allocs\n";
    for (std::size_t n : args.sizes) {
        sa::SplitMix64 db_rng(sa::derive_seed(seed, n));
        std::vector<sa::FastaRecord> db;
        db.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            db.push_back({"r" + std::to_string(i), "", random_protein(db_rng, args.record_length)});

        double best = std::numeric_limits<double>::infinity();
        std::size_t hits = 0;
        for (unsigned r = 0; r < std::max(1u, args.repeats); ++r) {
            sa::SpanSource source(db);
            const auto t0 = std::chrono::steady_clock::now();
            const auto report = sa::search_database(query, source, config, matrix);
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
            best = std::min(best, dt.count());
            hits = report.hits.size();
        }

        // Heap allocations per pair score on this thread; the core should make none.
        std::size_t aux = 0;
        for (std::size_t i = 0; i < std::min(n, args.probe_records); ++i) {
            sa::SearchConfig one = config;
            one.params.seed = sa::derive_seed(seed, i);
            sa::tools::AllocProbe::start();
            const sa::Score s = sa::search_align(query.view(), db[i].sequence, one, matrix);
            aux = std::max(aux, sa::tools::AllocProbe::stop());
            static_cast<void>(s);
        }

        std::cout << n << ',' << args.query_length << ',' << args.record_length << ',' << std::setprecision(6)
                  << best << ',' << hits << ',' << aux << '\n';
    }
    std::cerr << "seed\t" << seed << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized chop-and-slide protein alignment and database search"};
    app.require_subcommand(1);

    AlignArgs align;
    auto* align_cmd = app.add_subcommand("align", "Align two sequences heuristically");
    align.common.add_to(*align_cmd, true);
    auto* a_opt = align_cmd->add_option("--a", align.a, "First sequence");
    auto* af_opt = align_cmd->add_option("--a-fasta", align.a_fasta, "First sequence from FASTA (first record)");
    auto* b_opt = align_cmd->add_option("--b", align.b, "Second sequence");
    auto* bf_opt = align_cmd->add_option("--b-fasta", align.b_fasta, "Second sequence from FASTA (first record)");
    a_opt->excludes(af_opt);
    b_opt->excludes(bf_opt);
    align_cmd->add_flag("--exact", align.exact, "Also compute the exact optimal alignment");
    align_cmd->add_option("--exact-mode", align.exact_mode, "Exact aligner mode")
        ->check(CLI::IsMember({"global", "semiglobal", "local"}))
        ->capture_default_str();

    SearchArgs search;
    auto* search_cmd = app.add_subcommand("search", "Search a FASTA database with one query");
    search.common.add_to(*search_cmd, false);
    auto* q_opt = search_cmd->add_option("--query", search.query, "Query FASTA file (first record is used)");
    auto* qs_opt = search_cmd->add_option("--query-seq", search.query_seq, "Query sequence given inline");
    q_opt->excludes(qs_opt);
    search_cmd->add_option("--db", search.db, "Database FASTA file, optionally gzip-compressed")->required();
    search_cmd->add_option("--threshold", search.threshold, "Report records scoring at least this")->required();
    search_cmd->add_option("--max-hits", search.max_hits, "Keep only the best N hits");
    search_cmd->add_option("--threads", search.threads,
                           "Worker threads (default: SLIDEALIGN_THREADS or hardware concurrency)");
    search_cmd->add_flag("--show-alignments", search.show_alignments, "Print alignment rows under each hit");
    search_cmd->add_option("--output", search.output, "Write TSV here instead of stdout");
    search_cmd->add_option("--invalid-residues", search.invalid, "Records with unknown residues")
        ->check(CLI::IsMember({"reject", "replace"}))
        ->capture_default_str();
    search_cmd->add_flag("--strict-stop", search.strict_stop, "Treat '*' as invalid");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time searches over synthetic databases (CSV)");
    bench.common.add_to(*bench_cmd, false);
    bench_cmd->add_option("--n", bench.sizes, "Database sizes")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--m", bench.query_length, "Query length")->capture_default_str();
    bench_cmd->add_option("--length", bench.record_length, "Record length")->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads, "Worker threads")->capture_default_str();
    bench_cmd->add_option("--threshold", bench.threshold, "Hit threshold")->capture_default_str();
    bench_cmd->add_option("--repeats", bench.repeats, "Timing repeats; the fastest is reported")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*align_cmd) {
            if (align.a.empty() && align.a_fasta.empty()) throw sa::PreconditionError("need --a or --a-fasta");
            if (align.b.empty() && align.b_fasta.empty()) throw sa::PreconditionError("need --b or --b-fasta");
            return run_align(align);
        }
        if (*search_cmd) {
            if (search.query.empty() && search.query_seq.empty())
                throw sa::PreconditionError("need --query or --query-seq");
            return run_search(search);
        }
        return run_bench(bench);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
