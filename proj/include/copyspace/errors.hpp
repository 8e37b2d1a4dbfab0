#pragma once

#include <stdexcept>
#include <string>

namespace copyspace {

// Error taxonomy shared by the library and the CLI. The CLI maps kinds to
// exit codes: usage 2, input/parse 3, no-candidates 4, undefined-metric 5.
enum class ErrorKind {
    Argument,        // caller violated an operation precondition
    Parse,           // malformed text input, carries a locus when known
    Decode,          // unreadable or unsupported image bytes
    Validation,      // structurally valid input that fails a cross-record check
    Generation,      // synthesis could not satisfy its constraints
    Storage,         // filesystem read/write failure
    NoCandidates,    // detector produced no feasible candidate
    UndefinedMetric, // metric has no value on this input (e.g. zero ground truths)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorKind::Argument, what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what), line_(0) {}
    ParseError(const std::string& what, int line)
        : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    // 1-based line or record index; 0 when the locus is not line-oriented.
    int line() const { return line_; }

private:
    int line_;
};

class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& what) : Error(ErrorKind::Decode, what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& what) : Error(ErrorKind::Generation, what) {}
};

class StorageError : public Error {
public:
    explicit StorageError(const std::string& what) : Error(ErrorKind::Storage, what) {}
};

class NoCandidatesError : public Error {
public:
    explicit NoCandidatesError(const std::string& what) : Error(ErrorKind::NoCandidates, what) {}
};

class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& what) : Error(ErrorKind::UndefinedMetric, what) {}
};

} // namespace copyspace
