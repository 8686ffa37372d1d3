#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace driver_warning
{

/// Number of frames kept in every StateHistory.
inline constexpr std::size_t kHistoryLength = 10;

struct VehicleState
{
  double s{0.0};           ///< longitudinal position of the front bumper (m)
  int lane{0};             ///< lane index, 0 is the rightmost lane
  double lat_offset{0.0};  ///< lateral offset from the lane center (m), positive is left
  double v{0.0};           ///< longitudinal speed (m/s)
  double a{0.0};           ///< longitudinal acceleration over the last step (m/s^2)

  bool operator==(const VehicleState &) const = default;
};

/**
 * @brief Fixed-capacity ring of vehicle frames ordered oldest to newest.
 *
 * Copying never allocates, which keeps search-tree nodes cheap.
 */
class StateHistory
{
public:
  StateHistory() = default;
  explicit StateHistory(const VehicleState & initial) { push(initial); }

  void push(const VehicleState & frame);

  const VehicleState & current() const;
  /// i = 0 is the oldest stored frame.
  const VehicleState & at(std::size_t i) const;
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool operator==(const StateHistory & other) const;

private:
  std::array<VehicleState, kHistoryLength> frames_{};
  std::size_t head_{0};  // index of the oldest frame
  std::size_t size_{0};
};

struct AgentTrack
{
  int id{0};
  StateHistory history;

  const VehicleState & current() const { return history.current(); }
  bool operator==(const AgentTrack &) const = default;
};

struct MapInfo
{
  int lane_count{1};
  double lane_width{3.5};
  double speed_limit{16.7};

  bool operator==(const MapInfo &) const = default;
};

struct VehicleFootprint
{
  double length{4.5};
  double width{1.8};

  bool operator==(const VehicleFootprint &) const = default;
};

struct ScenarioState
{
  StateHistory ego;
  std::vector<AgentTrack> agents;
  MapInfo map;
  double t{0.0};
  double dt{0.5};

  const VehicleState & ego_now() const { return ego.current(); }
  bool operator==(const ScenarioState &) const = default;
};

enum class LaneCommand : std::uint8_t { Keep, ShiftLeft, ShiftRight };

struct DriverAction
{
  double accel{0.0};
  LaneCommand lane_cmd{LaneCommand::Keep};

  bool operator==(const DriverAction &) const = default;
};

/// Ordered from least to most severe.
enum class Warning : std::uint8_t { NoWarning = 0, Text, Voice, Alarm, TakeOver };

inline constexpr std::array<Warning, 5> kAllWarnings = {
  Warning::NoWarning, Warning::Text, Warning::Voice, Warning::Alarm, Warning::TakeOver};

inline constexpr std::size_t index_of(Warning w) { return static_cast<std::size_t>(w); }
inline constexpr int severity(Warning w) { return static_cast<int>(w); }

std::string_view to_string(Warning w);
std::optional<Warning> warning_from_string(std::string_view name);

std::string_view to_string(LaneCommand c);

/// Acceleration bounds shared by drivers, hazards and baselines.
struct AccelLimits
{
  double acc_min{-6.0};
  double acc_max{2.0};

  bool operator==(const AccelLimits &) const = default;
};

}  // namespace driver_warning
