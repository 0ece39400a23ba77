#pragma once

#include "repo2vec/classify.hpp"
#include "repo2vec/cluster.hpp"
#include "repo2vec/codeembed.hpp"
#include "repo2vec/common.hpp"
#include "repo2vec/corpus.hpp"
#include "repo2vec/eval.hpp"
#include "repo2vec/fusion.hpp"
#include "repo2vec/java_frontend.hpp"
#include "repo2vec/lda.hpp"
#include "repo2vec/pipeline.hpp"
#include "repo2vec/structembed.hpp"
#include "repo2vec/textembed.hpp"
#include "repo2vec/vector_io.hpp"
