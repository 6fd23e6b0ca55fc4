#pragma once

#include <resetwalks/core_model.hpp>
#include <resetwalks/errors.hpp>
#include <resetwalks/height_asymptotics.hpp>
#include <resetwalks/io.hpp>
#include <resetwalks/kernel_gf.hpp>
#include <resetwalks/mellin.hpp>
#include <resetwalks/moran_md.hpp>
#include <resetwalks/numeric.hpp>
#include <resetwalks/oracle.hpp>
#include <resetwalks/simulate.hpp>
#include <resetwalks/special_functions.hpp>
#include <resetwalks/validation.hpp>
