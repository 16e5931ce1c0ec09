#pragma once

#define RYDSIM_VERSION "0.1.0"
