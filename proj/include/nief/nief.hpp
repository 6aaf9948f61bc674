#pragma once

#include "nief/collisional_na.hpp"
#include "nief/core_scheme.hpp"
#include "nief/doppler_avg.hpp"
#include "nief/fwm_eit.hpp"
#include "nief/gain_optimizer.hpp"
#include "nief/interference_relax.hpp"
#include "nief/lics_continuum.hpp"
#include "nief/local_field.hpp"
#include "nief/parallel.hpp"
#include "nief/probe_spectra.hpp"
#include "nief/steady_state.hpp"
