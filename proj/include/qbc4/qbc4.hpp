#pragma once

#include "qbc4/core/pauli.hpp"
#include "qbc4/core/random.hpp"
#include "qbc4/core/registry.hpp"
#include "qbc4/core/state.hpp"
#include "qbc4/core/tolerance.hpp"
#include "qbc4/protocol/ensemble.hpp"
#include "qbc4/protocol/session.hpp"
#include "qbc4/protocol/states.hpp"
#include "qbc4/protocol/transcript.hpp"
#include "qbc4/analysis/adversary.hpp"
#include "qbc4/analysis/binding.hpp"
#include "qbc4/analysis/concealing.hpp"
#include "qbc4/analysis/reference.hpp"
#include "qbc4/analysis/relaxed.hpp"
#include "qbc4/analysis/unitary_search.hpp"
