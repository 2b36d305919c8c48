#pragma once

#include "qsd/comparison.hpp"
#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/estimate.hpp"
#include "qsd/fock.hpp"
#include "qsd/gaussian_state.hpp"
#include "qsd/marginal.hpp"
#include "qsd/monte_carlo.hpp"
#include "qsd/quadrature.hpp"
#include "qsd/receivers.hpp"
#include "qsd/special.hpp"
#include "qsd/state_io.hpp"
