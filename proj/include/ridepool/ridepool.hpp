#pragma once

// Umbrella header for the ride-pooling simulator and scaling-law toolkit.

#include "ridepool/demand.hpp"
#include "ridepool/engine.hpp"
#include "ridepool/fleet.hpp"
#include "ridepool/io.hpp"
#include "ridepool/laws.hpp"
#include "ridepool/matching.hpp"
#include "ridepool/random.hpp"
#include "ridepool/road_network.hpp"
#include "ridepool/version.hpp"
