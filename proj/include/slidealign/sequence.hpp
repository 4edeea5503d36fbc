#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "slidealign/errors.hpp"
#include "slidealign/scoring.hpp"

namespace slidealign {

/// Non-empty, uppercased residue string validated against a matrix alphabet.
class AminoAcidSequence {
public:
    AminoAcidSequence(std::string_view residues, const SubstitutionMatrix& matrix, std::string id = {},
                      std::string description = {})
        : id_(std::move(id)), description_(std::move(description)) {
        if (residues.empty()) throw PreconditionError("empty sequence" + (id_.empty() ? std::string{} : " '" + id_ + "'"));
        residues_.reserve(residues.size());
        for (char c : residues) residues_ += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        matrix.validate(residues_, id_.empty() ? std::string("sequence") : "sequence '" + id_ + "'");
    }

    AminoAcidSequence(std::string_view residues, std::string id = {}, std::string description = {})
        : AminoAcidSequence(residues, SubstitutionMatrix::blosum62(), std::move(id), std::move(description)) {}

    const std::string& residues() const noexcept { return residues_; }
    std::string_view view() const noexcept { return residues_; }
    std::size_t size() const noexcept { return residues_.size(); }
    const std::string& id() const noexcept { return id_; }
    const std::string& description() const noexcept { return description_; }

private:
    std::string residues_;
    std::string id_;
    std::string description_;
};

}  // namespace slidealign
