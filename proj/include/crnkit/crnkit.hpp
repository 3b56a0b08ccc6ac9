#pragma once

#include "crnkit/error.hpp"
#include "crnkit/network.hpp"
#include "crnkit/parser.hpp"
#include "crnkit/structure.hpp"
#include "crnkit/rate.hpp"
#include "crnkit/fock.hpp"
#include "crnkit/ssa.hpp"
#include "crnkit/io.hpp"
