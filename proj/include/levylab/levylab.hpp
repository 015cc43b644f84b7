#pragma once

#include "levylab/difference.hpp"
#include "levylab/domain.hpp"
#include "levylab/eigenpair.hpp"
#include "levylab/errors.hpp"
#include "levylab/experiment.hpp"
#include "levylab/generator.hpp"
#include "levylab/grid.hpp"
#include "levylab/harness.hpp"
#include "levylab/io.hpp"
#include "levylab/killed.hpp"
#include "levylab/levy_model.hpp"
#include "levylab/path_sim.hpp"
#include "levylab/quadrature.hpp"
#include "levylab/rng.hpp"
#include "levylab/semigroup.hpp"
