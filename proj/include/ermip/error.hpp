#pragma once

#include <stdexcept>
#include <string>

namespace ermip {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (negative delta, point off the disk, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A construction that cannot satisfy its contract for the given inputs.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Enumeration refused because the set is larger than the caller's cap.
class CardinalityError : public Error {
public:
    CardinalityError(const std::string& what, double count) : Error(what), count_(count) {}
    double count() const { return count_; }

private:
    double count_;
};

/// Bad experiment configuration; carries the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace ermip
