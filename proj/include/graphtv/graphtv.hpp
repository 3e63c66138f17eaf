#pragma once

#include "graph.hpp"
#include "imaging.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "solver.hpp"
#include "tv_model.hpp"
#include "verify.hpp"
