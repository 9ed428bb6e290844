#ifndef TIPP_TIPP_HPP
#define TIPP_TIPP_HPP

#include "bounds.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "gp_core.hpp"
#include "metrics.hpp"
#include "path_io.hpp"
#include "planners.hpp"
#include "transect.hpp"

namespace tipp {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
