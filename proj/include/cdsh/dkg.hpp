#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cdsh/group.hpp"
#include "cdsh/messages.hpp"
#include "cdsh/rng.hpp"

namespace cdsh {

class Ledger;
struct AccessToken;

inline constexpr std::size_t kKeySequenceLength = 256;

/// Private half SK = [psk_0 .. psk_255].
struct PrivateKeySequence {
  std::vector<Scalar> psk;
};

/// Public half PK = [ppk_0 .. ppk_255], ppk_b = psk_b * P.
struct PublicKeySequence {
  std::vector<Point> ppk;
  friend bool operator==(const PublicKeySequence&, const PublicKeySequence&) = default;
};

/// What an SD holds after registration.
struct DeviceCredentials {
  Did did;
  PrivateKeySequence sk;
  Scalar sv;  // H1(DID, s)
};

struct Registration {
  DeviceCredentials creds;
  std::shared_ptr<const PublicKeySequence> pk;
  /// ES nodes whose shares were summed into every slot, in share order.
  std::vector<std::string> contributors;
  /// Per-node shares [node][slot]; kept so tests can check the share sum.
  std::vector<std::vector<Scalar>> shares;
};

/// Pseudonym-indexed composite keys.
///
/// Selection rule: slot b (0 = most significant bit of PID2[0]) is
/// included iff bit b of PID2 is set; the composite key is the sum of the
/// selected entries. An all-zero PID2 selects every slot so the
/// selection count is always in [1, 256]. Because every slot pair
/// satisfies ppk_b = psk_b * P, the sums stay a key pair.
namespace dkg {

bool selected(const Digest& pid2, std::size_t slot);
/// Number of selected slots after the all-zero substitution.
std::size_t selection_count(const Digest& pid2);

Scalar derive_private(const Group& g, const Digest& pid2, const PrivateKeySequence& sk);
Point derive_public(const Group& g, const Digest& pid2, const PublicKeySequence& pk);

/// Draws one share per slot from each node and sums them mod q. Pure
/// key generation; no ledger interaction. Throws Error(kNoRegistrar) for
/// an empty node list.
Registration generate(const Group& g, const Did& did, std::span<const std::string> es_nodes,
                      const Scalar& s, Rng& rng);

/// Full registration: duplicate check against the ledger, key generation,
/// publication of PK on the ledger (or its digest, per ledger mode).
/// Throws Error(kAlreadyRegistered) for a known DID.
Registration register_device(const Group& g, const Did& did, std::span<const std::string> es_nodes,
                             const Scalar& s, Rng& rng, Ledger& ledger, const AccessToken& token);

/// PK ledger encoding: u32(len DID) || DID || 256 point encodings.
Bytes encode_public_sequence(const Group& g, const Did& did, const PublicKeySequence& pk);
std::pair<Did, PublicKeySequence> decode_public_sequence(const Group& g, ByteView b);

}  // namespace dkg
}  // namespace cdsh
