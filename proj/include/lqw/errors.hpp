#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lqw {

// Every library failure carries the name of its error kind so the CLI can
// report it without string-matching on messages.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LQW_DEFINE_ERROR(Name)                           \
  class Name : public Error {                            \
   public:                                               \
    explicit Name(const std::string& message)            \
        : Error(#Name, message) {}                       \
  }

LQW_DEFINE_ERROR(InvalidConfig);
LQW_DEFINE_ERROR(NoPeakFound);
LQW_DEFINE_ERROR(GridTooLarge);
LQW_DEFINE_ERROR(NotOrthogonal);
LQW_DEFINE_ERROR(DivergentSum);
LQW_DEFINE_ERROR(NotReflection);
LQW_DEFINE_ERROR(InsufficientData);
LQW_DEFINE_ERROR(IoError);
LQW_DEFINE_ERROR(ParseError);

#undef LQW_DEFINE_ERROR

}  // namespace lqw
