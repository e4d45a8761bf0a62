#ifndef TSALIGN_TSALIGN_HPP
#define TSALIGN_TSALIGN_HPP

#include "candidate.hpp"
#include "composers.hpp"
#include "consistency.hpp"
#include "core.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "tuning.hpp"

#endif // TSALIGN_TSALIGN_HPP
