#include "driver_warning/types.hpp"

#include <stdexcept>

namespace driver_warning
{

void StateHistory::push(const VehicleState & frame)
{
  if (size_ < kHistoryLength) {
    frames_[(head_ + size_) % kHistoryLength] = frame;
    ++size_;
    return;
  }
  frames_[head_] = frame;
  head_ = (head_ + 1) % kHistoryLength;
}

const VehicleState & StateHistory::current() const
{
  if (size_ == 0) {
    throw std::logic_error("StateHistory::current on empty history");
  }
  return frames_[(head_ + size_ - 1) % kHistoryLength];
}

const VehicleState & StateHistory::at(std::size_t i) const
{
  if (i >= size_) {
    throw std::out_of_range("StateHistory::at");
  }
  return frames_[(head_ + i) % kHistoryLength];
}

bool StateHistory::operator==(const StateHistory & other) const
{
  if (size_ != other.size_) {
    return false;
  }
  for (std::size_t i = 0; i < size_; ++i) {
    if (!(at(i) == other.at(i))) {
      return false;
    }
  }
  return true;
}

std::string_view to_string(Warning w)
{
  switch (w) {
    case Warning::NoWarning:
      return "NoWarning";
    case Warning::Text:
      return "Text";
    case Warning::Voice:
      return "Voice";
    case Warning::Alarm:
      return "Alarm";
    case Warning::TakeOver:
      return "TakeOver";
  }
  return "?";
}

std::optional<Warning> warning_from_string(std::string_view name)
{
  for (Warning w : kAllWarnings) {
    if (to_string(w) == name) {
      return w;
    }
  }
  return std::nullopt;
}

std::string_view to_string(LaneCommand c)
{
  switch (c) {
    case LaneCommand::Keep:
      return "keep";
    case LaneCommand::ShiftLeft:
      return "shift_left";
    case LaneCommand::ShiftRight:
      return "shift_right";
  }
  return "?";
}

}  // namespace driver_warning
