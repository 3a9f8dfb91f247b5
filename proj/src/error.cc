// Copyright 2026 The Podcar DBW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "podcar/error.h"

namespace podcar {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidMessage: return "InvalidMessage";
    case ErrorCode::kClockWentBackwards: return "ClockWentBackwards";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kDegenerateFit: return "DegenerateFit";
    case ErrorCode::kNoCalibration: return "NoCalibration";
    case ErrorCode::kUnsafeReset: return "UnsafeReset";
    case ErrorCode::kInvalidDt: return "InvalidDt";
    case ErrorCode::kNoValidDepth: return "NoValidDepth";
    case ErrorCode::kNonPsdCovariance: return "NonPSDCovariance";
    case ErrorCode::kBadAxisIndex: return "BadAxisIndex";
    case ErrorCode::kBadScenarioFile: return "BadScenarioFile";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kBadInput: return "BadInput";
    case ErrorCode::kLinkDown: return "LinkDown";
  }
  return "Unknown";
}

}  // namespace podcar
