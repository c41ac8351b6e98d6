#pragma once

#include "symcap/builders.hpp"
#include "symcap/capacities.hpp"
#include "symcap/certificate.hpp"
#include "symcap/certificate_json.hpp"
#include "symcap/ellipsoid.hpp"
#include "symcap/errors.hpp"
#include "symcap/exact.hpp"
#include "symcap/expr_io.hpp"
#include "symcap/known_values.hpp"
#include "symcap/packing.hpp"
#include "symcap/rational.hpp"
#include "symcap/real_expr.hpp"
#include "symcap/toric.hpp"
#include "symcap/weights.hpp"
