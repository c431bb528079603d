#ifndef FFTOWER_RATIONAL_HPP
#define FFTOWER_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace fftower {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string ratStr(const Rat& r) {
  return r.str();
}

inline Int ipow(Int base, unsigned e) {
  Int r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace fftower

#endif  // FFTOWER_RATIONAL_HPP
