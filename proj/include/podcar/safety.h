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

// Layered safety interlock. Each tick decides whether the traction power
// relay may close (terminals 30-87) and hence whether the spring brake is
// released. The motor may run only when every layer agrees:
//
//   hardware dead man's handle held
//   AND no e-stop received
//   AND board heartbeat alive
//   AND battery at or above the low-voltage threshold
//   AND no overcurrent trip
//   AND (autonomous mode OR gamepad enable button held)
//   AND no latched fault.
//
// E-stop and overcurrent latch until an explicit Reset(); everything else
// drops to STANDBY and recovers by itself.

#ifndef PODCAR_SAFETY_H_
#define PODCAR_SAFETY_H_

#include <string_view>

namespace podcar::safety {

enum class DriveMode { kManual, kAutonomous };
enum class SafetyState { kInit, kStandby, kActive, kFaultLatched };

enum class SafetyReason {
  kOk,
  kFaultLatched,
  kEStop,
  kOvercurrent,
  kDmhReleased,
  kHeartbeatStale,
  kLowBattery,
  kEnableReleased,
};

std::string_view DriveModeName(DriveMode mode);
std::string_view SafetyStateName(SafetyState state);
std::string_view SafetyReasonName(SafetyReason reason);

inline constexpr double kDefaultLowBatteryV = 22.0;

struct SafetyInputs {
  bool dmh_held = false;
  bool enable_held = false;
  bool estop_rx = false;
  bool heartbeat_stale = true;
  double battery_v = 0.0;
  bool overcurrent_trip = false;
  DriveMode mode = DriveMode::kManual;
};

struct SafetyDecision {
  bool motor_power = false;
  bool brake_released = false;
  SafetyState state = SafetyState::kInit;
  SafetyReason reason = SafetyReason::kOk;
};

// Pure transition function.
SafetyDecision Tick(SafetyState state, const SafetyInputs& inputs,
                    double low_batt_v = kDefaultLowBatteryV);

// True when nothing but the latch itself stands between the vehicle and
// STANDBY. The enable button is not required to re-arm.
bool SafeToReset(const SafetyInputs& inputs,
                 double low_batt_v = kDefaultLowBatteryV);

// FAULT_LATCHED -> STANDBY; any other state is returned unchanged. Throws
// Error(kUnsafeReset) if a latched fault is reset while inputs are unsafe.
SafetyState Reset(SafetyState state, const SafetyInputs& inputs,
                  double low_batt_v = kDefaultLowBatteryV);

// Owns the state between ticks.
class SafetySupervisor {
 public:
  explicit SafetySupervisor(double low_batt_v = kDefaultLowBatteryV)
      : low_batt_v_(low_batt_v) {}

  const SafetyDecision& Tick(const SafetyInputs& inputs);
  void Reset(const SafetyInputs& inputs);

  SafetyState state() const { return decision_.state; }
  const SafetyDecision& last() const { return decision_; }

 private:
  double low_batt_v_;
  SafetyDecision decision_;
};

}  // namespace podcar::safety

#endif  // PODCAR_SAFETY_H_
