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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace csk
{
    enum class ErrorCode
    {
        SingularTriad,
        OutsideGamut,
        UnsupportedOrder,
        LengthMismatch,
        InvalidPrefix,
        IndexOutOfRange,
        InvalidParameter,
        DimensionMismatch,
        SingularMatrix,
        EmptySupport,
        InvalidLength,
        SpectralNull,
        InvalidTarget,
        InvalidConfig
    };

    std::string_view to_string(ErrorCode code);

    // All library failures are reported through this type; code() identifies the failure class.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &message);
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };
}
