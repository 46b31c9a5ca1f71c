#pragma once

#include <stdexcept>
#include <string>

namespace cpinfer {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

struct range_error : error {
    using error::error;
};

struct invalid_scale_error : error {
    using error::error;
};

struct unsupported_degree_error : error {
    using error::error;
};

struct parameter_error : error {
    using error::error;
};

struct degenerate_scale_error : error {
    using error::error;
};

struct parse_error : error {
    parse_error(const std::string& what, long line) : error(what), line(line) {}
    long line;
};

}  // namespace cpinfer
