#pragma once
// Umbrella header.

#include "meanarc/arc_engine.hpp"
#include "meanarc/closed_forms.hpp"
#include "meanarc/critical.hpp"
#include "meanarc/estimators.hpp"
#include "meanarc/geometry.hpp"
#include "meanarc/driver.hpp"
#include "meanarc/report.hpp"
#include "meanarc/rng.hpp"
#include "meanarc/sampler.hpp"
#include "meanarc/shapes.hpp"
