#pragma once

#include <stdexcept>
#include <string>

namespace gaitface {

// Base class for all pipeline errors. Every failure mode named in a module
// contract has its own type so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define GAITFACE_DEFINE_ERROR(NAME)                            \
  class NAME : public Error {                                  \
   public:                                                     \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

// dataset ingestion
GAITFACE_DEFINE_ERROR(MissingFile);
GAITFACE_DEFINE_ERROR(SchemaViolation);
GAITFACE_DEFINE_ERROR(DanglingFramePath);
GAITFACE_DEFINE_ERROR(GroupSizeMismatch);
GAITFACE_DEFINE_ERROR(EmptyImage);

// gait cycle
GAITFACE_DEFINE_ERROR(SignalTooShort);
GAITFACE_DEFINE_ERROR(NoCycleFound);

// face ROI
GAITFACE_DEFINE_ERROR(NoPersonFound);
GAITFACE_DEFINE_ERROR(FaceNotVisible);
GAITFACE_DEFINE_ERROR(NoFaceInClip);

// networks and fusion
GAITFACE_DEFINE_ERROR(InvalidConfig);
GAITFACE_DEFINE_ERROR(ShapeMismatch);
GAITFACE_DEFINE_ERROR(DimensionMismatch);
GAITFACE_DEFINE_ERROR(BothZero);

// training and search
GAITFACE_DEFINE_ERROR(DataPreparationFailure);
GAITFACE_DEFINE_ERROR(DivergenceDetected);
GAITFACE_DEFINE_ERROR(EmptySpace);

// evaluation and reporting
GAITFACE_DEFINE_ERROR(EmptyRecordSet);
GAITFACE_DEFINE_ERROR(IdOutOfRange);
GAITFACE_DEFINE_ERROR(UnwritableOutput);

#undef GAITFACE_DEFINE_ERROR

}  // namespace gaitface
