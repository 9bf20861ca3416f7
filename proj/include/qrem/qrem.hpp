#pragma once

#include "qrem/analytics.hpp"
#include "qrem/errors.hpp"
#include "qrem/geometry.hpp"
#include "qrem/io.hpp"
#include "qrem/model.hpp"
#include "qrem/parallel.hpp"
#include "qrem/rng.hpp"
#include "qrem/spectral.hpp"
#include "qrem/sweep.hpp"
#include "qrem/version.hpp"
