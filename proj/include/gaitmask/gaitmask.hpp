#pragma once

// Umbrella header for the gait feature-masking toolkit.

#include "gaitmask/cross_validation.hpp"
#include "gaitmask/defaults.hpp"
#include "gaitmask/errors.hpp"
#include "gaitmask/experiment.hpp"
#include "gaitmask/features.hpp"
#include "gaitmask/io.hpp"
#include "gaitmask/model_io.hpp"
#include "gaitmask/pca.hpp"
#include "gaitmask/perturb.hpp"
#include "gaitmask/pld.hpp"
#include "gaitmask/resample.hpp"
#include "gaitmask/rng.hpp"
#include "gaitmask/scaler.hpp"
#include "gaitmask/sinusoid.hpp"
#include "gaitmask/splits.hpp"
#include "gaitmask/stride.hpp"
#include "gaitmask/suite.hpp"
#include "gaitmask/svm.hpp"
#include "gaitmask/synth.hpp"
#include "gaitmask/threading.hpp"
#include "gaitmask/types.hpp"
