#pragma once

#include "randers/errors.hpp"
#include "randers/finite_difference.hpp"
#include "randers/frame_geometry.hpp"
#include "randers/geodesics.hpp"
#include "randers/jet.hpp"
#include "randers/linalg.hpp"
#include "randers/parallel.hpp"
#include "randers/quad.hpp"
#include "randers/randers_engine.hpp"
#include "randers/report.hpp"
#include "randers/s3_model.hpp"
#include "randers/samples.hpp"
#include "randers/tensor_grid.hpp"
