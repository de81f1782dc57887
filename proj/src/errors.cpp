// SPDX-License-Identifier: Apache-2.0
//
// cskfde - colour shift keying link simulation over diffuse optical channels
// Copyright (C) 2026 The cskfde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cskfde/errors.hpp"

namespace csk
{
    std::string_view to_string(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::SingularTriad:
            return "SingularTriad";
        case ErrorCode::OutsideGamut:
            return "OutsideGamut";
        case ErrorCode::UnsupportedOrder:
            return "UnsupportedOrder";
        case ErrorCode::LengthMismatch:
            return "LengthMismatch";
        case ErrorCode::InvalidPrefix:
            return "InvalidPrefix";
        case ErrorCode::IndexOutOfRange:
            return "IndexOutOfRange";
        case ErrorCode::InvalidParameter:
            return "InvalidParameter";
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::SingularMatrix:
            return "SingularMatrix";
        case ErrorCode::EmptySupport:
            return "EmptySupport";
        case ErrorCode::InvalidLength:
            return "InvalidLength";
        case ErrorCode::SpectralNull:
            return "SpectralNull";
        case ErrorCode::InvalidTarget:
            return "InvalidTarget";
        case ErrorCode::InvalidConfig:
            return "InvalidConfig";
        }
        return "Unknown";
    }

    Error::Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }
}
