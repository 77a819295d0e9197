#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace panelecon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad CSV, bad config, unknown variable.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The data are valid but too short or too sparse for the requested estimator.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Design matrix (or a transformed one) is not of full column rank.
class CollinearityError : public Error {
public:
    CollinearityError(const std::string& what, std::vector<std::string> columns = {})
        : Error(what), columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::vector<std::string> columns_;
};

/// File-system or network failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Non-fatal diagnostics accumulated by an operation.
using Warnings = std::vector<std::string>;

}  // namespace panelecon
