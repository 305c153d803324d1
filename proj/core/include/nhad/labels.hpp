#pragma once

#include <map>
#include <string>
#include <string_view>

namespace nhad {

enum class AnomalyClass { Benign, Soft, Hard };

std::string_view to_string(AnomalyClass c) noexcept;
AnomalyClass anomaly_class_from_string(std::string_view text);

struct UserLabel {
  bool anomaly = false;
  AnomalyClass cls = AnomalyClass::Benign;

  friend bool operator==(const UserLabel&, const UserLabel&) = default;
};

/// Ground-truth label of every user in a run.
using GroundTruth = std::map<std::string, UserLabel, std::less<>>;

}  // namespace nhad
