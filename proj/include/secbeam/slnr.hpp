#pragma once

#include "secbeam/channel.hpp"
#include "secbeam/rates.hpp"

namespace secbeam {

/// Leakage-aware baseline: w_i proportional to
/// (sigma_i^2 I + sum_{k != i} conj(h_k) h_k^T)^{-1} conj(h_i), with |w_i|^2 = P / K.
/// Only the other users' estimated channels enter the leakage term.
BeamformerSet slnr_beamformers(const ChannelSet& cs, double power_budget);

}  // namespace secbeam
