#pragma once

#include "glasslocal/amp.hpp"
#include "glasslocal/disorder.hpp"
#include "glasslocal/errors.hpp"
#include "glasslocal/exact.hpp"
#include "glasslocal/experiments.hpp"
#include "glasslocal/glauber.hpp"
#include "glasslocal/localization.hpp"
#include "glasslocal/metrics.hpp"
#include "glasslocal/mixture.hpp"
#include "glasslocal/parallel.hpp"
#include "glasslocal/rng.hpp"
#include "glasslocal/scalar.hpp"
#include "glasslocal/state_evolution.hpp"
#include "glasslocal/tap.hpp"
#include "glasslocal/tensor_io.hpp"
#include "glasslocal/types.hpp"
