// Convenience umbrella header.

#ifndef ADDF_ADDF_HPP
#define ADDF_ADDF_HPP

#include "addf/image.hpp"
#include "addf/imaging.hpp"
#include "addf/manifest.hpp"
#include "addf/mcesp.hpp"
#include "addf/pgm.hpp"
#include "addf/rng.hpp"
#include "addf/simulator.hpp"
#include "addf/team.hpp"
#include "addf/version.hpp"

#endif
