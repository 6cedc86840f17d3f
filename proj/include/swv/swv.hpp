#pragma once

// Umbrella header: certification of switching signals for switched linear
// systems via quadratic certificates, switching statistics, and exact
// piecewise simulation.

#include "swv/certificates.hpp"
#include "swv/config.hpp"
#include "swv/eigen.hpp"
#include "swv/errors.hpp"
#include "swv/expm.hpp"
#include "swv/family.hpp"
#include "swv/lyapunov.hpp"
#include "swv/margins.hpp"
#include "swv/matrix.hpp"
#include "swv/report.hpp"
#include "swv/reproduce.hpp"
#include "swv/signal.hpp"
#include "swv/simulate.hpp"
#include "swv/version.hpp"
