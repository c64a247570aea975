#pragma once

#include "hypersign/analysis.hpp"
#include "hypersign/embedding_io.hpp"
#include "hypersign/error.hpp"
#include "hypersign/evaluator.hpp"
#include "hypersign/graph.hpp"
#include "hypersign/manifold.hpp"
#include "hypersign/rng.hpp"
#include "hypersign/sampler.hpp"
#include "hypersign/trainer.hpp"
#include "hypersign/version.hpp"
