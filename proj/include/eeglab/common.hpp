#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eeglab {

inline constexpr const char* kVersion = "0.1.0";

// Label value used for blank-screen segments throughout the pipeline.
inline constexpr int kBlankLabel = -1;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filter design rejected (bad cutoff ordering, cutoff at/above Nyquist).
struct CutoffError : Error {
    using Error::Error;
};

// Non-finite or otherwise malformed sample data.
struct DataError : Error {
    using Error::Error;
};

// Input shorter than discard + target when trimming.
struct LengthError : Error {
    using Error::Error;
};

// Inconsistent model dimensions.
struct SpecError : Error {
    using Error::Error;
};

// Training diverged (non-finite loss); carries the epoch it happened in.
struct TrainingError : Error {
    explicit TrainingError(const std::string& msg, std::size_t epoch_index)
        : Error(msg), epoch(epoch_index) {}
    std::size_t epoch;
};

struct EvalError : Error {
    using Error::Error;
};

// Too few images per class to populate every split.
struct StratificationError : Error {
    using Error::Error;
};

struct SubjectError : Error {
    using Error::Error;
};

// Normal equations not solvable without regularization.
struct SingularError : Error {
    using Error::Error;
};

// A class-mean encoding vector is (numerically) zero.
struct DegenerateEncodingError : Error {
    using Error::Error;
};

// Degenerate problem instance (e.g. a single class where >= 2 are needed).
struct DegenerateError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace eeglab
