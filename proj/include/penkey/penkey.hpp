// Umbrella header.
#pragma once

#include "penkey/bb84.hpp"
#include "penkey/bounds.hpp"
#include "penkey/errors.hpp"
#include "penkey/gme.hpp"
#include "penkey/linalg.hpp"
#include "penkey/network.hpp"
#include "penkey/network_io.hpp"
#include "penkey/packing.hpp"
#include "penkey/partition.hpp"
#include "penkey/protocol.hpp"
#include "penkey/spanning_trees.hpp"
