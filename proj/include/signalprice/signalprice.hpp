#pragma once

#include "signalprice/baselines.hpp"
#include "signalprice/core.hpp"
#include "signalprice/decomposition.hpp"
#include "signalprice/errors.hpp"
#include "signalprice/json_io.hpp"
#include "signalprice/linrev.hpp"
#include "signalprice/pricing.hpp"
#include "signalprice/private_signaling.hpp"
#include "signalprice/public_signaling.hpp"
#include "signalprice/random.hpp"
#include "signalprice/simplex.hpp"
