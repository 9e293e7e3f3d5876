#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace featrec {

// Root of every exception raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable, missing or empty input.
class InputError : public Error {
public:
    using Error::Error;
};

// Malformed CSV record. `row()` is the 1-based record number (header = 1).
class ParseError : public InputError {
public:
    ParseError(std::size_t row, const std::string& what)
        : InputError("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// Input that parses but violates the declared or inferred column schema.
class SchemaError : public InputError {
public:
    using InputError::InputError;
};

// Caller broke a precondition (bad lengths, non-permutation, out-of-range k).
class ContractError : public Error {
public:
    using Error::Error;
};

// Training data carries fewer than two classes.
class DegenerateLabelError : public ContractError {
public:
    using ContractError::ContractError;
};

// Invalid configuration value or unknown configuration key.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t epoch, const std::string& what)
        : Error("diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace featrec
