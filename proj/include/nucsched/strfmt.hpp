#pragma once

#include <sstream>
#include <string>
#include <string_view>

namespace nucsched {

// Minimal "{}" placeholder formatting; extra placeholders are kept verbatim.
inline void fmt_impl(std::ostringstream& out, std::string_view text) { out << text; }

template <class T, class... Rest>
void fmt_impl(std::ostringstream& out, std::string_view text, const T& value,
              const Rest&... rest) {
  size_t pos = text.find("{}");
  if (pos == std::string_view::npos) {
    out << text;
    return;
  }
  out << text.substr(0, pos) << value;
  fmt_impl(out, text.substr(pos + 2), rest...);
}

template <class... Args>
std::string fmt(std::string_view text, const Args&... args) {
  std::ostringstream out;
  fmt_impl(out, text, args...);
  return out.str();
}

}  // namespace nucsched
