#pragma once

#include "kpi/grid.hpp"
#include "kpi/field.hpp"
#include "kpi/fft.hpp"
#include "kpi/spectral.hpp"
#include "kpi/field_io.hpp"
#include "kpi/solitons.hpp"
#include "kpi/functionals.hpp"
#include "kpi/lemma_lab.hpp"
#include "kpi/linop.hpp"
#include "kpi/modulation.hpp"
#include "kpi/evolve.hpp"
#include "kpi/parallel.hpp"
