/*
 * Copyright 2026 The rscam Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef RSCAM_ERRORS_H_
#define RSCAM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rscam {

// Base class of every numerical failure raised by the library. Invalid
// arguments (violated preconditions) are reported with std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The point lies on (or too close to) the camera plane.
class DepthError : public Error {
 public:
  using Error::Error;
};

// The point crosses behind the camera while it is being scanned.
class NegativeDepth : public DepthError {
 public:
  using DepthError::DepthError;
};

// No scanline captures the point inside the frame window.
class NoScanTime : public Error {
 public:
  using Error::Error;
};

// A closed-form denominator vanished (the point moves with the scanline).
class Singularity : public Error {
 public:
  using Error::Error;
};

// Pin-hole motion: the two slits collapse onto the optical centre.
class DegenerateSlits : public Error {
 public:
  using Error::Error;
};

// Calibration spectrum without a significant peak.
class NoPeak : public Error {
 public:
  using Error::Error;
};

// Scene or experiment configuration that cannot produce a usable problem.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rscam

#endif  // RSCAM_ERRORS_H_
