#pragma once

#include "bsqz/analytic_oracle.hpp"
#include "bsqz/dynamics.hpp"
#include "bsqz/effective_model.hpp"
#include "bsqz/errors.hpp"
#include "bsqz/observables.hpp"
#include "bsqz/steady_state.hpp"
#include "bsqz/sweep.hpp"
