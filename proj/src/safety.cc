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

#include "podcar/safety.h"

#include <string>

#include "podcar/error.h"

namespace podcar::safety {
namespace {

// First non-latching violation, in reporting priority order.
SafetyReason StandbyReason(const SafetyInputs& in, double low_batt_v) {
  if (!in.dmh_held) return SafetyReason::kDmhReleased;
  if (in.heartbeat_stale) return SafetyReason::kHeartbeatStale;
  if (!(in.battery_v >= low_batt_v)) return SafetyReason::kLowBattery;
  if (in.mode == DriveMode::kManual && !in.enable_held) {
    return SafetyReason::kEnableReleased;
  }
  return SafetyReason::kOk;
}

}  // namespace

std::string_view DriveModeName(DriveMode mode) {
  return mode == DriveMode::kManual ? "MANUAL" : "AUTONOMOUS";
}

std::string_view SafetyStateName(SafetyState state) {
  switch (state) {
    case SafetyState::kInit: return "INIT";
    case SafetyState::kStandby: return "STANDBY";
    case SafetyState::kActive: return "ACTIVE";
    case SafetyState::kFaultLatched: return "FAULT_LATCHED";
  }
  return "UNKNOWN";
}

std::string_view SafetyReasonName(SafetyReason reason) {
  switch (reason) {
    case SafetyReason::kOk: return "ok";
    case SafetyReason::kFaultLatched: return "fault_latched";
    case SafetyReason::kEStop: return "estop";
    case SafetyReason::kOvercurrent: return "overcurrent";
    case SafetyReason::kDmhReleased: return "dmh_released";
    case SafetyReason::kHeartbeatStale: return "heartbeat_stale";
    case SafetyReason::kLowBattery: return "low_battery";
    case SafetyReason::kEnableReleased: return "enable_released";
  }
  return "unknown";
}

SafetyDecision Tick(SafetyState state, const SafetyInputs& inputs,
                    double low_batt_v) {
  SafetyDecision d;
  if (inputs.estop_rx || inputs.overcurrent_trip) {
    d.state = SafetyState::kFaultLatched;
    d.reason = inputs.estop_rx ? SafetyReason::kEStop : SafetyReason::kOvercurrent;
    return d;
  }
  if (state == SafetyState::kFaultLatched) {
    d.state = SafetyState::kFaultLatched;
    d.reason = SafetyReason::kFaultLatched;
    return d;
  }
  d.reason = StandbyReason(inputs, low_batt_v);
  if (d.reason != SafetyReason::kOk) {
    d.state = SafetyState::kStandby;
    return d;
  }
  d.state = SafetyState::kActive;
  d.motor_power = true;
  // The brake is spring-applied and releases only while current flows.
  d.brake_released = d.motor_power;
  return d;
}

bool SafeToReset(const SafetyInputs& inputs, double low_batt_v) {
  return inputs.dmh_held && !inputs.estop_rx && !inputs.heartbeat_stale &&
         inputs.battery_v >= low_batt_v && !inputs.overcurrent_trip;
}

SafetyState Reset(SafetyState state, const SafetyInputs& inputs,
                  double low_batt_v) {
  if (state != SafetyState::kFaultLatched) return state;
  if (!SafeToReset(inputs, low_batt_v)) {
    throw Error(ErrorCode::kUnsafeReset,
                "inputs still unsafe (" +
                    std::string(SafetyReasonName(
                        inputs.estop_rx ? SafetyReason::kEStop
                        : inputs.overcurrent_trip
                            ? SafetyReason::kOvercurrent
                            : StandbyReason(inputs, low_batt_v))) +
                    ")");
  }
  return SafetyState::kStandby;
}

const SafetyDecision& SafetySupervisor::Tick(const SafetyInputs& inputs) {
  decision_ = safety::Tick(decision_.state, inputs, low_batt_v_);
  return decision_;
}

void SafetySupervisor::Reset(const SafetyInputs& inputs) {
  const SafetyState next = safety::Reset(decision_.state, inputs, low_batt_v_);
  if (next != decision_.state) {
    decision_ = SafetyDecision{};
    decision_.state = next;
    decision_.reason = SafetyReason::kOk;
  }
}

}  // namespace podcar::safety
