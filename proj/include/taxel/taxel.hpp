#pragma once

#include "taxel/errors.hpp"
#include "taxel/material.hpp"
#include "taxel/physics.hpp"
#include "taxel/decoder.hpp"
#include "taxel/calibration.hpp"
#include "taxel/readout.hpp"
#include "taxel/scenario.hpp"
#include "taxel/run.hpp"
#include "taxel/demos.hpp"
#include "taxel/export.hpp"
