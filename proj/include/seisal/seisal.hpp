#pragma once

// Umbrella header: saliency mapping for seismic volumes via local spectra,
// directional center-surround comparison, and adaptive fusion.

#include "seisal/core.hpp"
#include "seisal/dcs.hpp"
#include "seisal/fusion.hpp"
#include "seisal/parallel.hpp"
#include "seisal/pipeline.hpp"
#include "seisal/segy.hpp"
#include "seisal/spectral.hpp"
#include "seisal/synth.hpp"
#include "seisal/volume.hpp"
#include "seisal/volume_io.hpp"
