#pragma once

// Everything except the command-line front end (leakage/cli.hpp).

#include "leakage/calibration.hpp"
#include "leakage/dataset.hpp"
#include "leakage/error.hpp"
#include "leakage/evidence.hpp"
#include "leakage/falsification.hpp"
#include "leakage/predictive.hpp"
#include "leakage/quadrature.hpp"
#include "leakage/random.hpp"
#include "leakage/regression.hpp"
#include "leakage/simulation.hpp"
