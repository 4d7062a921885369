#pragma once

namespace cardsketch {

// Result of feeding one (user, item) pair to an online estimator.
struct UpdateOutcome {
  bool modified;     // the pair changed sketch state (first time its cell/rank won)
  double increment;  // amount added to the user's running estimate
};

}  // namespace cardsketch
