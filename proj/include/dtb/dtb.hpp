// SPDX-License-Identifier: Apache-2.0
// Convenience header pulling in every module.
#ifndef DTB_DTB_HPP
#define DTB_DTB_HPP

#include "dtb/block_matrix.hpp"
#include "dtb/config.hpp"
#include "dtb/data_set.hpp"
#include "dtb/data_to_born.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/forward.hpp"
#include "dtb/gram.hpp"
#include "dtb/inversion.hpp"
#include "dtb/io.hpp"
#include "dtb/linalg.hpp"
#include "dtb/medium.hpp"
#include "dtb/mimo_rom.hpp"
#include "dtb/pulse.hpp"
#include "dtb/siso_rom.hpp"
#include "dtb/threading.hpp"

#endif  // DTB_DTB_HPP
