#pragma once

#include "citemap/citation_matrix.hpp"
#include "citemap/dense.hpp"
#include "citemap/error.hpp"
#include "citemap/factors.hpp"
#include "citemap/layout.hpp"
#include "citemap/pipeline.hpp"
#include "citemap/powerlaw.hpp"
#include "citemap/similarity.hpp"
#include "citemap/stats.hpp"
#include "citemap/synthetic.hpp"
