#pragma once

#include "bogolab/error.hpp"
#include "bogolab/model.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/sparse_operator.hpp"
#include "bogolab/operators.hpp"
#include "bogolab/superstability.hpp"
#include "bogolab/spectrum.hpp"
#include "bogolab/thermal.hpp"
#include "bogolab/coherent.hpp"
#include "bogolab/substitution.hpp"
#include "bogolab/maximize.hpp"
