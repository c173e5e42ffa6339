#pragma once
// Umbrella header.

#include "tsdae/extern_templates.hpp"
