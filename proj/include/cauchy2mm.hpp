#ifndef CAUCHY2MM_HPP
#define CAUCHY2MM_HPP

#include "cauchy2mm/scalar.hpp"
#include "cauchy2mm/matrix.hpp"
#include "cauchy2mm/polynomial.hpp"
#include "cauchy2mm/quadrature.hpp"
#include "cauchy2mm/weight.hpp"
#include "cauchy2mm/measures.hpp"
#include "cauchy2mm/report.hpp"
#include "cauchy2mm/bimoments.hpp"
#include "cauchy2mm/bops.hpp"
#include "cauchy2mm/cdrhp.hpp"
#include "cauchy2mm/correlations.hpp"
#include "cauchy2mm/montecarlo.hpp"
#include "cauchy2mm/equilibrium.hpp"
#include "cauchy2mm/o1bridge.hpp"

#endif
