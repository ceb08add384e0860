#pragma once

#include "fairmdp/axioms.hpp"
#include "fairmdp/confidence.hpp"
#include "fairmdp/errors.hpp"
#include "fairmdp/experiment.hpp"
#include "fairmdp/instance_io.hpp"
#include "fairmdp/instances.hpp"
#include "fairmdp/lagrange.hpp"
#include "fairmdp/matrix_game.hpp"
#include "fairmdp/mdp.hpp"
#include "fairmdp/oracle.hpp"
#include "fairmdp/planning.hpp"
#include "fairmdp/rng.hpp"
#include "fairmdp/ucrl.hpp"
#include "fairmdp/welfare.hpp"
