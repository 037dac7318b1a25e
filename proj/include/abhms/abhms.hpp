#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "multi_index.hpp"
#include "siegel.hpp"
#include "theta.hpp"
#include "bside.hpp"
#include "aside.hpp"
#include "mirror.hpp"
#include "json_io.hpp"
#include "sweep.hpp"
