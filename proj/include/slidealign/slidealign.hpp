#pragma once

#include "slidealign/errors.hpp"
#include "slidealign/fasta.hpp"
#include "slidealign/heuristic.hpp"
#include "slidealign/reference.hpp"
#include "slidealign/rng.hpp"
#include "slidealign/scoring.hpp"
#include "slidealign/search.hpp"
#include "slidealign/sequence.hpp"
