// SPDX-License-Identifier: MIT
/**
 * @file panelfactor.hpp
 * @brief Umbrella header for the panel factor-model library.
 */
#pragma once

#include "panelfactor/design.hpp"
#include "panelfactor/dimsel.hpp"
#include "panelfactor/errors.hpp"
#include "panelfactor/eup.hpp"
#include "panelfactor/factors.hpp"
#include "panelfactor/inference.hpp"
#include "panelfactor/kss.hpp"
#include "panelfactor/panel.hpp"
#include "panelfactor/spectests.hpp"
#include "panelfactor/spline.hpp"
#include "panelfactor/stats.hpp"
