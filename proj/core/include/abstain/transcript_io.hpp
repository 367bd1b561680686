#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "abstain/config.hpp"
#include "abstain/protocol.hpp"

namespace abstain {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV with '#' header lines (fingerprint, seed, run_id, target, point_kind
/// and the canonical config entries) followed by one row per round.
void write_transcript(std::ostream& out, const Transcript& t, const ConfigEntries* config = nullptr);

/// Inverse of write_transcript. The cumulative columns are checked against
/// the recomputed ledger. Config entries found in the header go to `config`.
Transcript read_transcript(std::istream& in, ConfigEntries* config = nullptr);

void write_transcript_file(const std::string& path, const Transcript& t, const ConfigEntries* config = nullptr);
Transcript read_transcript_file(const std::string& path, ConfigEntries* config = nullptr);

inline constexpr const char* kTranscriptColumns =
    "run_id,seed,t,c_t,x_serialized,y,yhat,level,rho_k,gamma0,gamma1,cum_misclass,cum_abst_iid";

}  // namespace abstain
