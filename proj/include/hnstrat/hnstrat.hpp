#pragma once

#include "hnstrat/error.hpp"
#include "hnstrat/rational.hpp"
#include "hnstrat/polynomial.hpp"
#include "hnstrat/complex.hpp"
#include "hnstrat/stability.hpp"
#include "hnstrat/hn.hpp"
#include "hnstrat/weights.hpp"
#include "hnstrat/beta.hpp"
#include "hnstrat/oracle.hpp"
#include "hnstrat/version.hpp"
