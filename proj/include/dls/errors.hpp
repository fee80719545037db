#pragma once

#include <stdexcept>
#include <string>

namespace dls {

/// Base class of every error raised by the library. Errors raised inside the
/// element loop carry the id of the offending element.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override { return message_.c_str(); }

  int element() const { return element_; }

  void set_element(int element) {
    if (element_ >= 0) return;
    element_ = element;
    message_ = "element " + std::to_string(element) + ": " + message_;
  }

 private:
  std::string message_;
  int element_ = -1;
};

#define DLS_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& message) : Error(message) {} \
  }

DLS_DEFINE_ERROR(NotPositiveDefinite);
DLS_DEFINE_ERROR(SingularTriangular);
DLS_DEFINE_ERROR(RankDeficient);
DLS_DEFINE_ERROR(ZeroMatrix);
DLS_DEFINE_ERROR(SingularSaddle);
DLS_DEFINE_ERROR(UnsupportedSpace);
DLS_DEFINE_ERROR(UnsupportedOrder);
DLS_DEFINE_ERROR(UnsupportedCombination);
DLS_DEFINE_ERROR(UnknownCase);
DLS_DEFINE_ERROR(NonpositiveDiagonal);
DLS_DEFINE_ERROR(RankDeficientBubbles);
DLS_DEFINE_ERROR(SingularBubbleBlock);
DLS_DEFINE_ERROR(ZeroSolution);
DLS_DEFINE_ERROR(ConfigError);

#undef DLS_DEFINE_ERROR

}  // namespace dls
