#pragma once

#include "heisenheat/capacity.hpp"
#include "heisenheat/config.hpp"
#include "heisenheat/cutoff.hpp"
#include "heisenheat/dynamics.hpp"
#include "heisenheat/experiments.hpp"
#include "heisenheat/field_io.hpp"
#include "heisenheat/fit.hpp"
#include "heisenheat/forcing.hpp"
#include "heisenheat/grid.hpp"
#include "heisenheat/group.hpp"
#include "heisenheat/lifespan.hpp"
#include "heisenheat/linear_solver.hpp"
#include "heisenheat/parallel.hpp"
#include "heisenheat/picard.hpp"
#include "heisenheat/quadrature.hpp"
#include "heisenheat/sublaplacian.hpp"
#include "heisenheat/verify.hpp"
#include "heisenheat/weak_form.hpp"
