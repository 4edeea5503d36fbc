// Heuristic versus exact alignment of two short proteins.
#include <iostream>

#include "slidealign/slidealign.hpp"

int main(int argc, char** argv) {
    using namespace slidealign;
    const std::string a = argc > 1 ? argv[1] : "MKTAYIAKQRQISFVKSHFSRQLEERLGLIEVQAPILSRVGDGTQDNLSGAEKAVQVKVKALPDAQ";
    const std::string b = argc > 2 ? argv[2] : "MKTAYIAKQRQISFVKSHFSRQDILDLWIYHTQGYFPDWQNYTPGPGVRYPLTFGW";

    const auto& matrix = SubstitutionMatrix::blosum62();
    const GapPenalties gaps{};  // pgp 0, gop 10, gep 5

    HeuristicParams params;
    params.rounds = 20;
    params.seed = 2024;

    try {
        const AminoAcidSequence sa(a), sb(b);
        const HeuristicAlignment h = align_sequences(sa, sb, params, matrix, gaps);
        const Alignment exact = optimal_align(sa, sb, matrix, gaps);

        std::cout << "heuristic  " << h.alignment.score << "  (round " << h.round + 1 << ")\n"
                  << "  " << h.alignment.row_a << "\n  " << h.alignment.row_b << "\n"
                  << "exact      " << exact.score << "\n"
                  << "  " << exact.row_a << "\n  " << exact.row_b << "\n";
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}
