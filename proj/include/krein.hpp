#pragma once

#include "krein/types.hpp"
#include "krein/measures.hpp"
#include "krein/polynomial.hpp"
#include "krein/linalg.hpp"
#include "krein/qherglotz.hpp"
#include "krein/hspace.hpp"
#include "krein/extension.hpp"
#include "krein/models.hpp"
