#pragma once

// 128-bit binary floating point for jets.  Requires GCC's libquadmath.

#include <boost/multiprecision/float128.hpp>

namespace randers {

using Quad = boost::multiprecision::float128;

}  // namespace randers
