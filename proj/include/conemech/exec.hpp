#pragma once

namespace conemech {

// Serial is the reference path; Parallel runs OpenMP loops with the same
// fixed reduction order, so both give bit-identical results.
enum class Exec { Serial, Parallel };

}  // namespace conemech
