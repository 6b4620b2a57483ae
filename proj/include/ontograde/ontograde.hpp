#pragma once

#include "ontograde/corpus.hpp"
#include "ontograde/correlation.hpp"
#include "ontograde/error.hpp"
#include "ontograde/grade.hpp"
#include "ontograde/maxent.hpp"
#include "ontograde/ontology.hpp"
#include "ontograde/porter.hpp"
#include "ontograde/preprocess.hpp"
#include "ontograde/report.hpp"
#include "ontograde/surface_metrics.hpp"
#include "ontograde/synth.hpp"
#include "ontograde/vectorspace.hpp"
