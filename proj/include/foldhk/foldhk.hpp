#pragma once

#include "foldhk/fourier_profile.hpp"
#include "foldhk/frame_forms.hpp"
#include "foldhk/vector_fields.hpp"
#include "foldhk/nahm_flow.hpp"
#include "foldhk/hk_reconstruction.hpp"
#include "foldhk/mode_laplacian.hpp"
#include "foldhk/quadrature.hpp"
#include "foldhk/fiber_model.hpp"
#include "foldhk/fit.hpp"
#include "foldhk/report.hpp"
#include "foldhk/suites.hpp"
