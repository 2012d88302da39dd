#pragma once

// Umbrella header: the whole library.

#include "ganlab/rng.hpp"
#include "ganlab/quadrature.hpp"
#include "ganlab/losses.hpp"
#include "ganlab/density.hpp"
#include "ganlab/divergence.hpp"
#include "ganlab/closed_form.hpp"
#include "ganlab/grad_analysis.hpp"
#include "ganlab/regions.hpp"
#include "ganlab/bounds.hpp"
#include "ganlab/activations.hpp"
#include "ganlab/tensor_nn.hpp"
#include "ganlab/data_metrics.hpp"
#include "ganlab/gan_train.hpp"
