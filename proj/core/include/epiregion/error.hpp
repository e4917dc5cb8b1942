/*
* Copyright (C) 2026 The epiregion authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPIREGION_ERROR_HPP
#define EPIREGION_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace epiregion
{

enum class ErrorKind
{
    InvalidArgument,
    ShapeMismatch,
    RegionTouchesBoundary,
    EmptyRegion,
    CapacityExceeded,
    StepTooLarge,
    LinearSolveFailure,
    NormUnderflow,
    NotConverged,
    NoConvergence,
    NonPositiveEigenvector,
    NonPositiveMultiplier,
    ZetaTooSmall,
    MissingDenseTrajectory,
    PositivityViolation,
    ParseError,
    ValidationError,
    IoError,
};

const char* to_string(ErrorKind kind);

/// True for errors caused by bad input rather than by a numerical failure.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& message, std::optional<double> value = std::nullopt)
        : std::runtime_error(message)
        , m_kind(kind)
        , m_value(value)
    {
    }

    ErrorKind kind() const
    {
        return m_kind;
    }

    /// Numeric payload, e.g. the last residual of a NotConverged run.
    std::optional<double> value() const
    {
        return m_value;
    }

private:
    ErrorKind m_kind;
    std::optional<double> m_value;
};

} // namespace epiregion

#endif // EPIREGION_ERROR_HPP
