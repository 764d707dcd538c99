#pragma once

#include "asymptotics.hpp"
#include "cli.hpp"
#include "continuation.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "newton.hpp"
#include "observables.hpp"
#include "quadrature.hpp"
#include "tolerances.hpp"
#include "transcendental.hpp"
#include "verify.hpp"
#include "wavefunction.hpp"
