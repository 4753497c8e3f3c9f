#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qgraph {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: graph descriptions, expressions, configuration.
class InputError : public Error {
public:
    using Error::Error;
};

/// Expression syntax error carrying the byte offset where parsing failed.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : InputError("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A computation could not reach the requested accuracy or hit a degenerate point.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The transition-matrix denominator vanished at this k.
class SingularPointError : public NumericalError {
public:
    SingularPointError(const std::string& what, double k_re, double k_im)
        : NumericalError(what), k_re_(k_re), k_im_(k_im) {}

    [[nodiscard]] double k_real() const noexcept { return k_re_; }
    [[nodiscard]] double k_imag() const noexcept { return k_im_; }

private:
    double k_re_;
    double k_im_;
};

/// Phase unwrapping failed because consecutive evaluation points were too far apart.
class PhaseStepError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace qgraph
