#include "ncprox/log.hpp"

#include <iostream>
#include <utility>

namespace ncprox {
namespace {

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) {
    std::cerr << "ncprox: warning: " << msg << '\n';
  };
  return s;
}

}  // namespace

void warn(std::string_view message) {
  if (sink()) sink()(message);
}

WarningSink set_warning_sink(WarningSink s) {
  return std::exchange(sink(), std::move(s));
}

}  // namespace ncprox
