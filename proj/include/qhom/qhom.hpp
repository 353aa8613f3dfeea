#pragma once

#include "qhom/bloch.hpp"
#include "qhom/cache.hpp"
#include "qhom/cell.hpp"
#include "qhom/common.hpp"
#include "qhom/direct1d.hpp"
#include "qhom/fourier.hpp"
#include "qhom/io.hpp"
#include "qhom/runner.hpp"
#include "qhom/spectral.hpp"
#include "qhom/tensor.hpp"
#include "qhom/trigsum.hpp"
#include "qhom/winding.hpp"
