/**
 * @file su3engine.hpp
 * @brief Umbrella header for the collective three-level heat-engine library.
 */
#pragma once

#include "su3engine/types.hpp"
#include "su3engine/su3_algebra.hpp"
#include "su3engine/schur_weyl.hpp"
#include "su3engine/engine.hpp"
#include "su3engine/thermo.hpp"
#include "su3engine/spectra.hpp"
#include "su3engine/oracle.hpp"
