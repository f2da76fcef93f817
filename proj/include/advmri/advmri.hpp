#pragma once

#include "advmri/attack.hpp"
#include "advmri/io.hpp"
#include "advmri/phantoms.hpp"
#include "advmri/theory1d.hpp"
#include "advmri/transforms.hpp"
#include "advmri/tv.hpp"
