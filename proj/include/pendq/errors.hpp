/*
 Copyright 2026 The pendq Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef PENDQ_ERRORS_HPP
#define PENDQ_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pendq {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    Ok = 0,
    Validation = 2,
    Io = 3,
    Parse = 4,
    NotConverged = 5,
    Shape = 6,
    DegenerateData = 7,
    Singular = 8,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept = 0;
};

/// Non-finite or out-of-domain input to a physical model.
class ModelDomainError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Validation; }
};

/// A parameter or configuration value violates its type's invariants.
class ValidationError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Validation; }
};

/// Mismatched dimensions between arguments.
class ContractError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Validation; }
};

class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double abs_det)
        : Error(what), abs_det_(abs_det) {}
    double abs_det() const noexcept { return abs_det_; }
    ExitCode exit_code() const noexcept override { return ExitCode::Singular; }

private:
    double abs_det_;
};

class DegenerateDataError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::DegenerateData; }
};

class IoError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Io; }
};

/// Malformed text input; line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    ExitCode exit_code() const noexcept override { return ExitCode::Parse; }

private:
    std::size_t line_;
};

class ShapeError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::Shape; }
};

}  // namespace pendq

#endif  // PENDQ_ERRORS_HPP
