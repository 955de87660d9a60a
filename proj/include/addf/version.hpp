#ifndef ADDF_VERSION_HPP
#define ADDF_VERSION_HPP

namespace addf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace addf

#endif
