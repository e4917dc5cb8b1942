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
#include "epiregion/error.hpp"

namespace epiregion
{

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument:
        return "InvalidArgument";
    case ErrorKind::ShapeMismatch:
        return "ShapeMismatch";
    case ErrorKind::RegionTouchesBoundary:
        return "RegionTouchesBoundary";
    case ErrorKind::EmptyRegion:
        return "EmptyRegion";
    case ErrorKind::CapacityExceeded:
        return "CapacityExceeded";
    case ErrorKind::StepTooLarge:
        return "StepTooLarge";
    case ErrorKind::LinearSolveFailure:
        return "LinearSolveFailure";
    case ErrorKind::NormUnderflow:
        return "NormUnderflow";
    case ErrorKind::NotConverged:
        return "NotConverged";
    case ErrorKind::NoConvergence:
        return "NoConvergence";
    case ErrorKind::NonPositiveEigenvector:
        return "NonPositiveEigenvector";
    case ErrorKind::NonPositiveMultiplier:
        return "NonPositiveMultiplier";
    case ErrorKind::ZetaTooSmall:
        return "ZetaTooSmall";
    case ErrorKind::MissingDenseTrajectory:
        return "MissingDenseTrajectory";
    case ErrorKind::PositivityViolation:
        return "PositivityViolation";
    case ErrorKind::ParseError:
        return "ParseError";
    case ErrorKind::ValidationError:
        return "ValidationError";
    case ErrorKind::IoError:
        return "IoError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::RegionTouchesBoundary:
    case ErrorKind::EmptyRegion:
    case ErrorKind::CapacityExceeded:
    case ErrorKind::MissingDenseTrajectory:
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::IoError:
        return true;
    default:
        return false;
    }
}

} // namespace epiregion
