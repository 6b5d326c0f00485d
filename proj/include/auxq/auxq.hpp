#pragma once

#include "qcore.hpp"
#include "repz.hpp"
#include "sixvertex.hpp"
#include "intertwiner.hpp"
#include "qop.hpp"
#include "spectra.hpp"
