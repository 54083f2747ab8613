#pragma once

#include "commands.hpp"
#include "config.hpp"
#include "constants.hpp"
#include "detector.hpp"
#include "frame_io.hpp"
#include "grid.hpp"
#include "interference.hpp"
#include "matrix_io.hpp"
#include "report.hpp"
#include "retrieval.hpp"
#include "spectra.hpp"
#include "vapor.hpp"
