#pragma once

// Parameter file: {"k": 4, "d": 2, "beta": {"": 0.0, "1": -0.3, "1,2": -0.1}}
// Subsets are comma-separated 1-based rules, "" is the empty set. Subsets
// missing from "beta" are 0.
//
// Design file: {"k": 3, "weights": {"000": 0.25, "110": 0.75}}
// Keys are bit strings with character i holding x_{i+1}.

#include <iosfwd>
#include <string>

#include "rasch/model.hpp"

namespace rasch {

struct ParameterFile {
  InteractionModel model;
  ParameterVector theta;
};

ParameterFile read_parameters(std::istream& in);
ParameterFile read_parameters_file(const std::string& path);
std::string parameters_to_json(const ParameterVector& theta, const InteractionModel& m);

// Weights are renormalized when their total is within 1e-6 of 1.
Design read_design(std::istream& in);
Design read_design_file(const std::string& path);
std::string design_to_json(const Design& w);

}  // namespace rasch
