#pragma once

#include "shapedba/averaging.hpp"
#include "shapedba/clustering.hpp"
#include "shapedba/dtw.hpp"
#include "shapedba/error.hpp"
#include "shapedba/evaluation.hpp"
#include "shapedba/pairwise.hpp"
#include "shapedba/sbd.hpp"
#include "shapedba/series.hpp"
#include "shapedba/shape_dtw.hpp"
#include "shapedba/soft_dtw.hpp"
#include "shapedba/statistics.hpp"
