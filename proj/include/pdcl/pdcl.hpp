#pragma once

#include "pdcl/grid.hpp"
#include "pdcl/io.hpp"
#include "pdcl/operators.hpp"
#include "pdcl/oracle.hpp"
#include "pdcl/pdhg.hpp"
#include "pdcl/preconditioner.hpp"
#include "pdcl/problems.hpp"
#include "pdcl/strategies.hpp"
