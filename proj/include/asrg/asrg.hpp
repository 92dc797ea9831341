#pragma once

#include "asrg/components.hpp"
#include "asrg/evaluate.hpp"
#include "asrg/grow.hpp"
#include "asrg/image.hpp"
#include "asrg/io.hpp"
#include "asrg/kmeans.hpp"
#include "asrg/median.hpp"
#include "asrg/pipeline.hpp"
#include "asrg/seeds.hpp"
#include "asrg/synth.hpp"
#include "asrg/threshold.hpp"
