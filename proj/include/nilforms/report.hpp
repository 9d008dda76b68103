#ifndef NILFORMS_REPORT_HPP
#define NILFORMS_REPORT_HPP

#include <string>

#include "json.hpp"

namespace nilforms {

using Json = nlohmann::ordered_json;

// Deterministic serialization: insertion key order, floats always printed
// with 17 significant digits, 2-space indentation, trailing newline.
std::string serialize_report(const Json& j);

std::string format_double(double v);

}  // namespace nilforms

#endif
