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

#ifndef PRIVSIM_CLI_EXIT_CODES_H_
#define PRIVSIM_CLI_EXIT_CODES_H_

#include "absl/status/status.h"

namespace privsim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitCalibration = 3,
  kExitIo = 4,
};

// Marks `status` as a privacy-calibration failure. The code is kept.
absl::Status AsCalibrationError(absl::Status status);
bool IsCalibrationError(const absl::Status& status);

// Calibration-tagged -> 3; NotFound, PermissionDenied, DataLoss,
// Unavailable -> 4; InvalidArgument, FailedPrecondition, OutOfRange -> 2;
// anything else -> 1.
int ExitCodeFor(const absl::Status& status);

}  // namespace privsim::cli

#endif  // PRIVSIM_CLI_EXIT_CODES_H_
