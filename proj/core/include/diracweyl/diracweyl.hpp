#ifndef DIRACWEYL_DIRACWEYL_HPP
#define DIRACWEYL_DIRACWEYL_HPP

#include "diracweyl/characterization.hpp"
#include "diracweyl/direct.hpp"
#include "diracweyl/errors.hpp"
#include "diracweyl/inverse.hpp"
#include "diracweyl/io.hpp"
#include "diracweyl/structured.hpp"
#include "diracweyl/transform.hpp"
#include "diracweyl/types.hpp"

#endif  // DIRACWEYL_DIRACWEYL_HPP
