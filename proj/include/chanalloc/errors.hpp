#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chanalloc {

/// Library-wide error categories. Mirrored one-to-one by the C API status codes.
enum class Errc {
    invalid_argument,
    domain,
    parse,
    insufficient_data,
    io,
    bind,
    state,
    internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, std::string what) : std::runtime_error(std::move(what)), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string what) { throw Error(code, std::move(what)); }

}  // namespace chanalloc
