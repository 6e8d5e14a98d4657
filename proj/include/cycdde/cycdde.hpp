#pragma once

#include "cycdde/error.hpp"
#include "cycdde/feedback.hpp"
#include "cycdde/genenet.hpp"
#include "cycdde/hermite.hpp"
#include "cycdde/integrator.hpp"
#include "cycdde/io.hpp"
#include "cycdde/lyapunov.hpp"
#include "cycdde/nonlinearity.hpp"
#include "cycdde/orbit.hpp"
#include "cycdde/quadrature.hpp"
#include "cycdde/spectral.hpp"
#include "cycdde/state.hpp"
#include "cycdde/steady.hpp"
#include "cycdde/system.hpp"
