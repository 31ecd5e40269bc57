// Copyright 2026 The spci Authors. All rights reserved.
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

#include "spci/error.hpp"

namespace spci {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kAllZeroInBand: return "AllZeroInBand";
    case ErrorKind::kBandOutOfRange: return "BandOutOfRange";
    case ErrorKind::kDurationTooShort: return "DurationTooShort";
    case ErrorKind::kNonUniformSampling: return "NonUniformSampling";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kEmptyFile: return "EmptyFile";
    case ErrorKind::kTruncatedFile: return "TruncatedFile";
    case ErrorKind::kUnknownLayout: return "UnknownLayout";
    case ErrorKind::kMissingFile: return "MissingFile";
    case ErrorKind::kDuplicateKey: return "DuplicateKey";
    case ErrorKind::kInvalidPairing: return "InvalidPairing";
    case ErrorKind::kMissingRecord: return "MissingRecord";
    case ErrorKind::kUnpairedRecord: return "UnpairedRecord";
    case ErrorKind::kInsufficientRepetitions: return "InsufficientRepetitions";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace spci
