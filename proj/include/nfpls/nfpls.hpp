#pragma once

// Near-field physical-layer security toolkit: spherical-wavefront channels,
// closed-form secrecy analysis with artificial noise, beam-geometry
// interference sets, and the beamforming optimizers built on them.

#include "nfpls/geometry.hpp"
#include "nfpls/fresnel.hpp"
#include "nfpls/rng.hpp"
#include "nfpls/channel.hpp"
#include "nfpls/correlation.hpp"
#include "nfpls/secrecy.hpp"
#include "nfpls/beam_geometry.hpp"
#include "nfpls/beamformer.hpp"
#include "nfpls/stats.hpp"
#include "nfpls/config.hpp"
#include "nfpls/experiment.hpp"
