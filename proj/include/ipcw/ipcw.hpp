#pragma once

#include "ipcw/censoring.hpp"
#include "ipcw/dataset.hpp"
#include "ipcw/errors.hpp"
#include "ipcw/model.hpp"
#include "ipcw/oracle.hpp"
#include "ipcw/outcome.hpp"
#include "ipcw/pseudo.hpp"
#include "ipcw/rng.hpp"
#include "ipcw/simulate.hpp"
#include "ipcw/solver.hpp"
#include "ipcw/variance.hpp"
