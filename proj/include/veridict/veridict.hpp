#pragma once

#include "veridict/augment_gate.hpp"
#include "veridict/authenticity.hpp"
#include "veridict/bundle.hpp"
#include "veridict/classifiers.hpp"
#include "veridict/config.hpp"
#include "veridict/corpus.hpp"
#include "veridict/error.hpp"
#include "veridict/evaluation.hpp"
#include "veridict/harvester.hpp"
#include "veridict/label.hpp"
#include "veridict/pipeline.hpp"
#include "veridict/text_features.hpp"
#include "veridict/url.hpp"
