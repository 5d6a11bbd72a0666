#ifndef POLYFRONT_STATE_HPP_
#define POLYFRONT_STATE_HPP_

#include <string>

namespace polyfront {

// Saturation, polymer fraction, permeability. All in [0,1].
struct State {
  double s = 0.0;
  double c = 0.0;
  double k = 0.0;

  bool operator==(const State&) const = default;
};

bool in_unit_cube(const State& u, double tol = 0.0);
std::string to_string(const State& u);

}  // namespace polyfront

#endif  // POLYFRONT_STATE_HPP_
