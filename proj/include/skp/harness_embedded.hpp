#pragma once

namespace skp {

// Source of src/check_harness.py, baked in at build time so the binary can
// run from anywhere.
const char* embedded_check_harness();

}  // namespace skp
