#include "gcflow/kernels.hpp"
