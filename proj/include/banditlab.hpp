#pragma once

#include "banditlab/errors.hpp"
#include "banditlab/random.hpp"
#include "banditlab/model.hpp"
#include "banditlab/posterior.hpp"
#include "banditlab/arm_statistics.hpp"
#include "banditlab/confidence.hpp"
#include "banditlab/agents.hpp"
#include "banditlab/complexity.hpp"
#include "banditlab/bounds.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/audits.hpp"
#include "banditlab/io.hpp"
#include "banditlab/config.hpp"
#include "banditlab/commands.hpp"
