#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slidealign {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A residue that is not part of the substitution-matrix alphabet.
class AlphabetError : public Error {
public:
    explicit AlphabetError(char residue, const std::string& context = {})
        : Error(describe(residue, context)), residue_(residue) {}

    char residue() const noexcept { return residue_; }

private:
    static std::string describe(char residue, const std::string& context) {
        std::string msg = "unknown residue '";
        if (static_cast<unsigned char>(residue) < 0x20 || static_cast<unsigned char>(residue) >= 0x7f) {
            msg += "\\x";
            constexpr char hex[] = "0123456789abcdef";
            msg += hex[(static_cast<unsigned char>(residue) >> 4) & 0xf];
            msg += hex[static_cast<unsigned char>(residue) & 0xf];
        } else {
            msg += residue;
        }
        msg += "'";
        if (!context.empty()) msg += " in " + context;
        return msg;
    }

    char residue_;
};

/// Malformed alignment rows (unequal lengths, double-gap columns, ...).
class StructureError : public Error {
public:
    using Error::Error;
};

/// An index or shift outside its legal range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Invalid arguments: empty sequences, out-of-range parameters.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace slidealign
