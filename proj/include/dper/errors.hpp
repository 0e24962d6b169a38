#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dper {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;

    /// Stable machine-readable kind, e.g. "NoObservedData".
    [[nodiscard]] virtual const char* kind() const noexcept { return "Error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "InvalidArgument"; }
};

/// A feature has no observed entry in the rows it is estimated from.
class NoObservedData : public Error {
public:
    NoObservedData(std::int64_t feature, std::optional<std::int64_t> cls)
        : Error(make_message(feature, cls)), feature_(feature), class_(cls) {}

    [[nodiscard]] std::int64_t feature() const noexcept { return feature_; }
    [[nodiscard]] std::optional<std::int64_t> class_id() const noexcept { return class_; }
    [[nodiscard]] const char* kind() const noexcept override { return "NoObservedData"; }

    /// Same error with the class tag attached.
    [[nodiscard]] NoObservedData with_class(std::int64_t cls) const { return {feature_, cls}; }

private:
    static std::string make_message(std::int64_t feature, std::optional<std::int64_t> cls) {
        std::string msg = "feature " + std::to_string(feature) + " has no observed entries";
        if (cls) msg += " in class " + std::to_string(*cls);
        return msg;
    }

    std::int64_t feature_;
    std::optional<std::int64_t> class_;
};

/// sigma12 outside the open interval (-sqrt(s11 s22), sqrt(s11 s22)).
class DomainError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "DomainError"; }
};

/// Every coefficient of the stationarity polynomial is zero: the objective is flat.
class DegenerateObjective : public Error {
public:
    DegenerateObjective() : Error("objective is constant in sigma12 (all polynomial coefficients vanish)") {}
    [[nodiscard]] const char* kind() const noexcept override { return "DegenerateObjective"; }
};

class InsufficientCompleteRows : public Error {
public:
    explicit InsufficientCompleteRows(std::vector<std::int64_t> surviving)
        : Error(make_message(surviving)), surviving_(std::move(surviving)) {}

    /// Complete rows left per class after listwise deletion.
    [[nodiscard]] const std::vector<std::int64_t>& surviving() const noexcept { return surviving_; }
    [[nodiscard]] const char* kind() const noexcept override { return "InsufficientCompleteRows"; }

private:
    static std::string make_message(const std::vector<std::int64_t>& s) {
        std::string msg = "listwise deletion leaves too few complete rows per class:";
        for (auto c : s) msg += " " + std::to_string(c);
        return msg;
    }

    std::vector<std::int64_t> surviving_;
};

class MaskInfeasible : public Error {
public:
    MaskInfeasible(std::int64_t feature, std::int64_t cls)
        : Error("cannot keep an observed entry of feature " + std::to_string(feature) + " in class " +
                std::to_string(cls) + " after 100 re-draws"),
          feature_(feature), class_(cls) {}

    [[nodiscard]] std::int64_t feature() const noexcept { return feature_; }
    [[nodiscard]] std::int64_t class_id() const noexcept { return class_; }
    [[nodiscard]] const char* kind() const noexcept override { return "MaskInfeasible"; }

private:
    std::int64_t feature_;
    std::int64_t class_;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "ShapeMismatch"; }
};

class TimeBudgetExceeded : public Error {
public:
    TimeBudgetExceeded() : Error("time budget exceeded") {}
    [[nodiscard]] const char* kind() const noexcept override { return "TimeBudgetExceeded"; }
};

class ParseError : public Error {
public:
    ParseError(std::int64_t line, std::int64_t column, const std::string& reason)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + reason),
          line_(line), column_(column), reason_(reason) {}

    [[nodiscard]] std::int64_t line() const noexcept { return line_; }
    [[nodiscard]] std::int64_t column() const noexcept { return column_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }
    [[nodiscard]] const char* kind() const noexcept override { return "ParseError"; }

private:
    std::int64_t line_;
    std::int64_t column_;
    std::string reason_;
};

class MissingLabel : public Error {
public:
    explicit MissingLabel(std::int64_t line)
        : Error("line " + std::to_string(line) + ": label is missing"), line_(line) {}

    [[nodiscard]] std::int64_t line() const noexcept { return line_; }
    [[nodiscard]] const char* kind() const noexcept override { return "MissingLabel"; }

private:
    std::int64_t line_;
};

}  // namespace dper
