#pragma once

#include "strichartz/common.hpp"
#include "strichartz/fft.hpp"
#include "strichartz/fit.hpp"
#include "strichartz/lattice.hpp"
#include "strichartz/profiles.hpp"
#include "strichartz/counting.hpp"
#include "strichartz/norms.hpp"
#include "strichartz/counterexample.hpp"
#include "strichartz/arithmetic.hpp"
#include "strichartz/bilinear.hpp"
#include "strichartz/extremizer.hpp"
#include "strichartz/gkdv.hpp"
#include "strichartz/io.hpp"
#include "strichartz/schema.hpp"
