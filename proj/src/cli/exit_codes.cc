// Copyright 2026 The privsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privsim/cli/exit_codes.h"

#include "absl/strings/cord.h"

namespace privsim::cli {
namespace {

constexpr char kCalibrationPayload[] = "privsim/calibration";

}  // namespace

absl::Status AsCalibrationError(absl::Status status) {
  if (status.ok()) return status;
  status.SetPayload(kCalibrationPayload, absl::Cord("1"));
  return status;
}

bool IsCalibrationError(const absl::Status& status) {
  return status.GetPayload(kCalibrationPayload).has_value();
}

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  if (IsCalibrationError(status)) return kExitCalibration;
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kUnavailable:
      return kExitIo;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kExitConfig;
    default:
      return kExitInternal;
  }
}

}  // namespace privsim::cli
