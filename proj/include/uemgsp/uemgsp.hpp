#pragma once

#include "uemgsp/csv.hpp"
#include "uemgsp/datagen.hpp"
#include "uemgsp/detector.hpp"
#include "uemgsp/diffusion.hpp"
#include "uemgsp/experiment.hpp"
#include "uemgsp/graph.hpp"
#include "uemgsp/gso.hpp"
#include "uemgsp/rng.hpp"
#include "uemgsp/spectral.hpp"
#include "uemgsp/uem.hpp"
