#ifndef ADSCOPE_ERRORS_HPP
#define ADSCOPE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace adscope {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- dexparse ---

struct DexError : Error {
    uint64_t offset;
    DexError(const std::string& msg, uint64_t off)
        : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

struct MalformedHeader : DexError {
    using DexError::DexError;
};

struct IndexOutOfRange : DexError {
    using DexError::DexError;
};

struct TruncatedSection : DexError {
    using DexError::DexError;
};

// --- ingest ---

struct ManifestSyntax : Error {
    size_t line;
    ManifestSyntax(const std::string& msg, size_t ln)
        : Error("manifest line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

struct DuplicateAppId : Error {
    explicit DuplicateAppId(const std::string& id)
        : Error("duplicate app_id: " + id) {}
};

struct RecordSyntax : Error {
    size_t line;
    RecordSyntax(const std::string& msg, size_t ln)
        : Error("call-log line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

struct NoDexFound : Error {
    explicit NoDexFound(const std::string& path)
        : Error("no DEX entries in " + path) {}
};

struct ArchiveCorrupt : Error {
    explicit ArchiveCorrupt(const std::string& msg)
        : Error("corrupt archive: " + msg) {}
};

// --- libid ---

struct AmbiguousRegistry : Error {
    explicit AmbiguousRegistry(const std::string& msg)
        : Error("ambiguous registry: " + msg) {}
};

struct EmptyPackage : Error {
    explicit EmptyPackage(const std::string& pkg)
        : Error("no classes under package " + pkg) {}
};

// --- privclass ---

struct RulesetSyntax : Error {
    size_t line;
    RulesetSyntax(const std::string& msg, size_t ln)
        : Error("ruleset line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

struct ConflictingOverrides : Error {
    explicit ConflictingOverrides(const std::string& msg)
        : Error("conflicting overrides: " + msg) {}
};

// --- report ---

struct DegenerateInput : Error {
    explicit DegenerateInput(const std::string& msg)
        : Error("degenerate input: " + msg) {}
};

// --- cli ---

struct MissingCache : Error {
    explicit MissingCache(const std::string& msg)
        : Error("missing cache: " + msg) {}
};

struct MissingFixture : Error {
    explicit MissingFixture(const std::string& path)
        : Error("missing fixture file: " + path) {}
};

struct UnknownLibrary : Error {
    explicit UnknownLibrary(const std::string& name)
        : Error("unknown library: " + name) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace adscope

#endif
