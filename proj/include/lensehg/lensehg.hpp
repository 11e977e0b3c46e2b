#pragma once

// Umbrella header: pulls in the whole library.

#include "lensehg/config.hpp"
#include "lensehg/errors.hpp"
#include "lensehg/identities.hpp"
#include "lensehg/kernel.hpp"
#include "lensehg/lattice.hpp"
#include "lensehg/modular.hpp"
#include "lensehg/quadrature.hpp"
#include "lensehg/report.hpp"
#include "lensehg/rng.hpp"
#include "lensehg/sumint.hpp"
#include "lensehg/susy.hpp"
#include "lensehg/version.hpp"
