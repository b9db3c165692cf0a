#pragma once

#include "i2e/convert.hpp"
#include "i2e/energy.hpp"
#include "i2e/events.hpp"
#include "i2e/formats.hpp"
#include "i2e/hash.hpp"
#include "i2e/image.hpp"
#include "i2e/kernels.hpp"
#include "i2e/parallel.hpp"
#include "i2e/preprocess.hpp"
#include "i2e/random.hpp"
#include "i2e/reference.hpp"
#include "i2e/spiking.hpp"
#include "i2e/stats.hpp"
#include "i2e/version.hpp"
