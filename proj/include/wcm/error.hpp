#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wcm {

/// A model parameterization violates its invariants (bad pmf, missing kernel row, ...).
class spec_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain of an operation (unsupported degree, s outside [0,1], ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested weight carries no stub mass, so its stub-biased degree distribution is undefined.
class no_stubs_error : public domain_error {
public:
    explicit no_stubs_error(int weight)
        : domain_error("weight " + std::to_string(weight) + " has no stubs"), weight_(weight) {}
    int weight() const noexcept { return weight_; }

private:
    int weight_;
};

/// An iterative solver stopped before meeting its tolerance.
/// Carries the last two iterates so callers can judge how close it got.
class numerical_failure : public std::runtime_error {
public:
    numerical_failure(const std::string& what, std::vector<double> previous, std::vector<double> last)
        : std::runtime_error(what), previous_(std::move(previous)), last_(std::move(last)) {}

    const std::vector<double>& previous_iterate() const noexcept { return previous_; }
    const std::vector<double>& last_iterate() const noexcept { return last_; }

private:
    std::vector<double> previous_;
    std::vector<double> last_;
};

/// Failure while reading a count table or edge list.
class ingest_error : public std::runtime_error {
public:
    enum class kind { io, malformed_row, negative_count, divisibility, no_records };

    ingest_error(kind k, std::size_t row, const std::string& what)
        : std::runtime_error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
          kind_(k), row_(row) {}

    kind error_kind() const noexcept { return kind_; }
    /// 1-based line number of the offending row; 0 when the error is not tied to a row.
    std::size_t row() const noexcept { return row_; }

private:
    kind kind_;
    std::size_t row_;
};

} // namespace wcm
