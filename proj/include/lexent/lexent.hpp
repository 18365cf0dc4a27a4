#pragma once

#include "lexent/corpus.hpp"
#include "lexent/entropy.hpp"
#include "lexent/errors.hpp"
#include "lexent/markov.hpp"
#include "lexent/rng.hpp"
#include "lexent/sem_info.hpp"
#include "lexent/sem_net.hpp"
#include "lexent/suffix_automaton.hpp"
#include "lexent/word_order.hpp"
