#pragma once

// Everything except the command-line front end (rabi/cli.hpp).

#include "rabi/conjecture.hpp"
#include "rabi/errors.hpp"
#include "rabi/exceptional.hpp"
#include "rabi/gfunction.hpp"
#include "rabi/model.hpp"
#include "rabi/numeric.hpp"
#include "rabi/oracle.hpp"
#include "rabi/report.hpp"
#include "rabi/spectrum.hpp"
