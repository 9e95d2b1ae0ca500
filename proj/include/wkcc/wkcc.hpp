#ifndef WKCC_WKCC_HPP
#define WKCC_WKCC_HPP

#include "wkcc/clustering.hpp"
#include "wkcc/convex_pca.hpp"
#include "wkcc/error.hpp"
#include "wkcc/gaussian.hpp"
#include "wkcc/geometry.hpp"
#include "wkcc/io.hpp"
#include "wkcc/kcentres.hpp"
#include "wkcc/kmeans.hpp"
#include "wkcc/metrics.hpp"
#include "wkcc/normal.hpp"
#include "wkcc/simulation.hpp"
#include "wkcc/report.hpp"
#include "wkcc/theory.hpp"

#endif  // WKCC_WKCC_HPP
