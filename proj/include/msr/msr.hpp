#ifndef MSR_MSR_HPP
#define MSR_MSR_HPP

#include "msr/codec.hpp"
#include "msr/cube.hpp"
#include "msr/errors.hpp"
#include "msr/gf2m.hpp"
#include "msr/params.hpp"
#include "msr/shard.hpp"
#include "msr/solver.hpp"
#include "msr/verify.hpp"

#endif
