#pragma once

#include "chebnet/builder.hpp"
#include "chebnet/cheb_core.hpp"
#include "chebnet/conditioning.hpp"
#include "chebnet/constructor.hpp"
#include "chebnet/error.hpp"
#include "chebnet/expression.hpp"
#include "chebnet/multi_index.hpp"
#include "chebnet/quadrature.hpp"
#include "chebnet/repu_net.hpp"
#include "chebnet/serialization.hpp"
#include "chebnet/trainer.hpp"
#include "chebnet/version.hpp"
