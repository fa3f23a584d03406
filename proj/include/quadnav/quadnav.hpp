#pragma once

// Umbrella header for the quadnav library: quadrotor dead reckoning from
// inertial data — strapdown baseline, model-based QDR, the QuadNet
// regressor, and multi-IMU fusion.

#include "quadnav/attitude.hpp"
#include "quadnav/checkpoint.hpp"
#include "quadnav/config.hpp"
#include "quadnav/csvio.hpp"
#include "quadnav/data.hpp"
#include "quadnav/experiment.hpp"
#include "quadnav/fusion.hpp"
#include "quadnav/geodesy.hpp"
#include "quadnav/metrics.hpp"
#include "quadnav/network.hpp"
#include "quadnav/qdr.hpp"
#include "quadnav/strapdown.hpp"
#include "quadnav/synth.hpp"
#include "quadnav/tensor.hpp"
#include "quadnav/train.hpp"
#include "quadnav/types.hpp"
#include "quadnav/windowing.hpp"
