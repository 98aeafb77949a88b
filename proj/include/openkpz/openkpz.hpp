#pragma once

#define OPENKPZ_VERSION "0.1.0"

#include "openkpz/asep.hpp"
#include "openkpz/askey_wilson.hpp"
#include "openkpz/cdh.hpp"
#include "openkpz/kpz.hpp"
#include "openkpz/measure.hpp"
#include "openkpz/query.hpp"
#include "openkpz/rng.hpp"
#include "openkpz/specfun.hpp"
