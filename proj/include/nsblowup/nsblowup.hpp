#pragma once

#include "nsblowup/besov_morrey.hpp"
#include "nsblowup/correlation.hpp"
#include "nsblowup/errors.hpp"
#include "nsblowup/heat_flows.hpp"
#include "nsblowup/heat_integrals.hpp"
#include "nsblowup/initial_data.hpp"
#include "nsblowup/meyer.hpp"
#include "nsblowup/poly_gauss.hpp"
#include "nsblowup/quadrature.hpp"
#include "nsblowup/reduce.hpp"
#include "nsblowup/stats.hpp"
#include "nsblowup/tensor_gauss.hpp"
#include "nsblowup/version.hpp"
#include "nsblowup/wavelet_index.hpp"
