#ifndef SHARPCONE_SHARPCONE_HPP
#define SHARPCONE_SHARPCONE_HPP

#include "kernel.hpp"
#include "algebra.hpp"
#include "modular.hpp"
#include "feasibility.hpp"
#include "cone.hpp"
#include "embeddings.hpp"
#include "recovery.hpp"
#include "scenario.hpp"
#include "report.hpp"
#include "commands.hpp"

#endif
