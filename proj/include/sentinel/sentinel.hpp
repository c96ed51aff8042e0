#pragma once

#include <sentinel/detector.hpp>
#include <sentinel/evalkit.hpp>
#include <sentinel/gammafit.hpp>
#include <sentinel/pipeline.hpp>
#include <sentinel/reconstruct.hpp>
#include <sentinel/scenario.hpp>
#include <sentinel/smoothing.hpp>
