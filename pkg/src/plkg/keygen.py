"""Privacy amplification by hashing and cross-node stream comparison.

The hash input framing is fixed bit-exactly so independent implementations
interoperate: bits are packed most-significant-bit-first into bytes, the
final byte is zero-padded, and the unpadded bit length is appended as an
8-byte big-endian trailer before SHA-256. Only bit content enters the hash;
provenance metadata does not.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .channel import ALICE, BOB, EVE
from .quantizer import BitStream

KEY_BITS = 256


def pack_stream(bits: BitStream) -> bytes:
    packed = np.packbits(bits.bits).tobytes()
    return packed + struct.pack(">Q", len(bits))


@dataclass(frozen=True)
class KeyMaterial:
    key: bytes  # 32 bytes
    source_bits: int
    entropy_bound_bits: int
    low_entropy_warning: bool

    @property
    def hex(self) -> str:
        return self.key.hex()


def amplify(bits: BitStream, entropy_bound_bits: int) -> KeyMaterial:
    """Compress a quantized stream into a 256-bit key; warn when the
    stream's entropy bound falls short of the key length."""
    if len(bits) == 0:
        raise ValueError("cannot amplify an empty stream")
    digest = hashlib.sha256(pack_stream(bits)).digest()
    return KeyMaterial(
        key=digest,
        source_bits=len(bits),
        entropy_bound_bits=entropy_bound_bits,
        low_entropy_warning=entropy_bound_bits < KEY_BITS,
    )


def key_disagreement_rate(a: BitStream, b: BitStream) -> float:
    """Hamming distance over length; equal lengths required."""
    if len(a) != len(b):
        raise ValueError(
            f"streams differ in length ({len(a)} vs {len(b)}): "
            "elimination was not synchronized between the nodes"
        )
    if len(a) == 0:
        return 0.0
    return float(np.mean(a.bits != b.bits))


@dataclass(frozen=True)
class AgreementReport:
    pre_hash_kdr: float
    keys_match: bool


@dataclass(frozen=True)
class AgreementResult:
    alice_bob: AgreementReport
    alice_eve: AgreementReport | None
    bob_eve: AgreementReport | None
    keys: dict[str, KeyMaterial]


def _pair_report(a: BitStream, b: BitStream) -> AgreementReport:
    kdr = key_disagreement_rate(a, b)
    return AgreementReport(pre_hash_kdr=kdr, keys_match=bool(np.array_equal(a.bits, b.bits)))


def agree(
    alice_bits: BitStream,
    bob_bits: BitStream,
    eve_bits: BitStream | None,
    entropy_bound_bits: int,
) -> AgreementResult:
    """Pairwise disagreement reports plus a 256-bit key per node."""
    keys = {
        ALICE: amplify(alice_bits, entropy_bound_bits),
        BOB: amplify(bob_bits, entropy_bound_bits),
    }
    alice_eve = bob_eve = None
    if eve_bits is not None:
        keys[EVE] = amplify(eve_bits, entropy_bound_bits)
        alice_eve = _pair_report(alice_bits, eve_bits)
        bob_eve = _pair_report(bob_bits, eve_bits)
    return AgreementResult(
        alice_bob=_pair_report(alice_bits, bob_bits),
        alice_eve=alice_eve,
        bob_eve=bob_eve,
        keys=keys,
    )
