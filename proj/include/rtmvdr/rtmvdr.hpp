#pragma once

#include "rtmvdr/asymptotics.hpp"
#include "rtmvdr/config.hpp"
#include "rtmvdr/errors.hpp"
#include "rtmvdr/figures.hpp"
#include "rtmvdr/harness.hpp"
#include "rtmvdr/mvdr.hpp"
#include "rtmvdr/rte.hpp"
#include "rtmvdr/scenario.hpp"
#include "rtmvdr/stats.hpp"
