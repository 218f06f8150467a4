#pragma once

#include "nuttall/bessel.hpp"
#include "nuttall/errors.hpp"
#include "nuttall/incgamma.hpp"
#include "nuttall/log_scaled.hpp"
#include "nuttall/moments.hpp"
#include "nuttall/quadrature.hpp"
