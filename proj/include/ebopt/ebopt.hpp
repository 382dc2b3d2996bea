#pragma once

#include "ebopt/adjoint.hpp"
#include "ebopt/banded.hpp"
#include "ebopt/config.hpp"
#include "ebopt/control.hpp"
#include "ebopt/dynamics.hpp"
#include "ebopt/errors.hpp"
#include "ebopt/field_io.hpp"
#include "ebopt/grid.hpp"
#include "ebopt/operators.hpp"
#include "ebopt/random_fields.hpp"
#include "ebopt/verify.hpp"
