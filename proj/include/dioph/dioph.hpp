#pragma once

#include "dioph/certificate.hpp"
#include "dioph/daniflow.hpp"
#include "dioph/diophantine.hpp"
#include "dioph/error.hpp"
#include "dioph/interval.hpp"
#include "dioph/kslattice.hpp"
#include "dioph/lll.hpp"
#include "dioph/numberfield.hpp"
#include "dioph/poly.hpp"
#include "dioph/real.hpp"
#include "dioph/singconstruct.hpp"
