#pragma once

#include "lz/asymptotics.hpp"
#include "lz/core.hpp"
#include "lz/errors.hpp"
#include "lz/integrator.hpp"
#include "lz/pcf.hpp"
#include "lz/reports.hpp"
#include "lz/special/kummer.hpp"
#include "lz/special/log_gamma.hpp"
#include "lz/wkb.hpp"
