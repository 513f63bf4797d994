#pragma once

#include <string>
#include <vector>

#include "gaitface/clip.hpp"
#include "gaitface/manifest.hpp"

namespace gaitface {

// One training/evaluation unit: the aligned gait and face clips of a sequence.
struct Sample {
  ClipTensor gait;
  ClipTensor face;
  int label = 0;  // subject id
  Angle angle = Angle::deg0;
  int sequence_index = 0;
  std::string tag;
};

}  // namespace gaitface
