#pragma once

#include "vsgrasp/augment.hpp"
#include "vsgrasp/cgd_io.hpp"
#include "vsgrasp/error.hpp"
#include "vsgrasp/grasp_eval.hpp"
#include "vsgrasp/grasp_rect.hpp"
#include "vsgrasp/pose.hpp"
#include "vsgrasp/random.hpp"
#include "vsgrasp/servo_sim.hpp"
#include "vsgrasp/vs_dataset.hpp"
