#ifndef FTN_ERRORS_HPP
#define FTN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ftn {

// Error taxonomy shared by the library and the CLI exit codes:
//   ConfigError / ContractError / SizeError -> exit 2
//   IoError / FormatError (and subclasses)  -> exit 3
//   NumericError                            -> exit 4

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct FormatError : IoError {
    explicit FormatError(const std::string& what) : IoError(what) {}
};

struct VersionError : FormatError {
    explicit VersionError(const std::string& what) : FormatError(what) {}
};

struct TruncatedFileError : FormatError {
    explicit TruncatedFileError(const std::string& what) : FormatError(what) {}
};

struct ChecksumError : FormatError {
    explicit ChecksumError(const std::string& what) : FormatError(what) {}
};

}  // namespace ftn

#endif
