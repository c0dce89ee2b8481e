#pragma once

#include "pvfp/classify.hpp"
#include "pvfp/csv.hpp"
#include "pvfp/encoding.hpp"
#include "pvfp/error.hpp"
#include "pvfp/eventlog.hpp"
#include "pvfp/fingerprint.hpp"
#include "pvfp/haar.hpp"
#include "pvfp/pipeline.hpp"
#include "pvfp/random.hpp"
#include "pvfp/select.hpp"
#include "pvfp/stats.hpp"
#include "pvfp/svm.hpp"
#include "pvfp/synthgen.hpp"
#include "pvfp/timestamp.hpp"
