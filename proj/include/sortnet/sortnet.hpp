#pragma once

#include "bit_vector.hpp"
#include "catalog.hpp"
#include "cnf.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "external_solver.hpp"
#include "network.hpp"
#include "prefix.hpp"
#include "render.hpp"
#include "serialize.hpp"
#include "solver.hpp"
#include "synth.hpp"
