#pragma once

#include "pcd/alternatives.hpp"
#include "pcd/delaunay.hpp"
#include "pcd/digraph.hpp"
#include "pcd/efficacy.hpp"
#include "pcd/error.hpp"
#include "pcd/geometry.hpp"
#include "pcd/io.hpp"
#include "pcd/montecarlo.hpp"
#include "pcd/normal.hpp"
#include "pcd/null_moments.hpp"
#include "pcd/version.hpp"
