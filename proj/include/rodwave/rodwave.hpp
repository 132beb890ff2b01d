#pragma once

#include "rodwave/version.hpp"
#include "rodwave/errors.hpp"
#include "rodwave/materials.hpp"
#include "rodwave/rod_impedance.hpp"
#include "rodwave/trench_dispersion.hpp"
#include "rodwave/cell_scattering.hpp"
#include "rodwave/bloch.hpp"
#include "rodwave/config.hpp"
#include "rodwave/output.hpp"
#include "rodwave/workbench.hpp"
