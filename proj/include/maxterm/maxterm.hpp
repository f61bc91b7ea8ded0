/**
 * @file maxterm.hpp
 * @brief Umbrella header for the rigorous part of the library.
 */
#pragma once

#include "maxterm/ball.hpp"
#include "maxterm/certificate_io.hpp"
#include "maxterm/certify.hpp"
#include "maxterm/dyadic.hpp"
#include "maxterm/error.hpp"
#include "maxterm/rational.hpp"
#include "maxterm/search.hpp"
#include "maxterm/series.hpp"
#include "maxterm/version.hpp"
