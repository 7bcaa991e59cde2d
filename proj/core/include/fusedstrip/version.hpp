#pragma once

#define FUSEDSTRIP_VERSION_MAJOR 0
#define FUSEDSTRIP_VERSION_MINOR 1
#define FUSEDSTRIP_VERSION_PATCH 0
#define FUSEDSTRIP_VERSION "0.1.0"
