#pragma once

#include <stdexcept>
#include <string>

namespace hintgen {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- view-hierarchy / manifest parsing ---
struct MalformedXml : Error { using Error::Error; };
struct MalformedBounds : Error { using Error::Error; };
struct MissingPackage : Error { using Error::Error; };

// --- entity extraction ---
struct DegenerateBounds : Error { using Error::Error; };
struct BadPath : Error { using Error::Error; };
struct NotAnInput : Error { using Error::Error; };

// --- example store / embeddings ---
struct DimensionMismatch : Error { using Error::Error; };
struct DuplicateId : Error { using Error::Error; };

// --- simulated device ---
struct SchemaError : Error { using Error::Error; };
struct UnknownField : Error { using Error::Error; };
struct UnknownScreen : Error { using Error::Error; };

// --- LLM backend. Everything the gateway can fail with derives from
// BackendFailure so the pipeline can propagate one category.
struct BackendFailure : Error { using Error::Error; };
struct NetworkError : BackendFailure { using BackendFailure::BackendFailure; };
struct TimeoutError : BackendFailure { using BackendFailure::BackendFailure; };
struct MockMiss : BackendFailure { using BackendFailure::BackendFailure; };
struct UnparseableResponse : Error { using Error::Error; };
struct UnparseableAfterReminder : BackendFailure { using BackendFailure::BackendFailure; };

// --- metrics ---
struct LengthMismatch : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };

} // namespace hintgen
