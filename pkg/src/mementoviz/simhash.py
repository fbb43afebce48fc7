"""128-bit similarity fingerprints of memento HTML.

Near-duplicate pages yield near-identical fingerprints, so the number of
differing hexadecimal characters between two fingerprints tracks how much
the underlying HTML changed. Distances are counted per hex character (not
per bit), giving the 0..32 range the selection thresholds operate on.

Fingerprints are computed over the raw HTML source, not the rendered page:
downloading and hashing source is far cheaper than rendering, and layout
markup ends up in the token stream where it usefully contributes to the
fingerprint.

FINGERPRINT_VERSION ties the token-hash seed to the on-disk cache format;
changing the seed or the tokenizer must bump it, which invalidates caches.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

FINGERPRINT_VERSION = 1
_TOKEN_HASH_SEED = b"mementoviz.simhash.v1:"
_TOKEN_RE = re.compile(r"[a-z0-9]+")

FeatureBag = Counter  # multiset of token -> occurrence count

_HEX_RE = re.compile(r"\A[0-9a-f]{32}\Z")


@dataclass(frozen=True, slots=True)
class SimHashValue:
    """A 128-bit fingerprint, canonically a 32-char lowercase hex string."""

    hex: str

    def __post_init__(self) -> None:
        if not _HEX_RE.match(self.hex):
            raise ValueError(f"not a 32-char lowercase hex string: {self.hex!r}")

    @classmethod
    def from_bits(cls, bits: int) -> "SimHashValue":
        if bits < 0 or bits >= 1 << 128:
            raise ValueError("bits out of 128-bit range")
        return cls(f"{bits:032x}")

    @property
    def bits(self) -> int:
        return int(self.hex, 16)

    def __str__(self) -> str:
        return self.hex


def tokenize_html(html: bytes) -> FeatureBag:
    """Split raw HTML bytes into a lowercase token multiset.

    Bytes are decoded as UTF-8 with replacement; anything outside [a-z0-9]
    separates tokens, so markup characters delimit tag and attribute names
    into ordinary tokens.
    """
    text = html.decode("utf-8", errors="replace").lower()
    return Counter(_TOKEN_RE.findall(text))


def _token_bits(token: str) -> np.ndarray:
    digest = hashlib.md5(_TOKEN_HASH_SEED + token.encode("utf-8")).digest()
    return np.unpackbits(np.frombuffer(digest, dtype=np.uint8))


def simhash(bag: FeatureBag) -> SimHashValue:
    """Weighted-vote fingerprint over the token bag.

    Each token hashes to 128 bits; every bit position accumulates +weight
    where the token's bit is 1 and -weight where it is 0. An output bit is
    set iff its signed sum is positive, so ties (and the empty bag) give 0.
    Deterministic across runs and platforms.
    """
    votes = np.zeros(128, dtype=np.int64)
    for token, weight in bag.items():
        if weight < 1:
            raise ValueError(f"feature weight must be >= 1: {token!r} -> {weight}")
        votes += weight * (2 * _token_bits(token).astype(np.int64) - 1)
    packed = np.packbits((votes > 0).astype(np.uint8)).tobytes()
    return SimHashValue(packed.hex())


def fingerprint_html(html: bytes) -> SimHashValue:
    return simhash(tokenize_html(html))


def hamming_distance(a: SimHashValue, b: SimHashValue) -> int:
    """Number of hexadecimal character positions at which a and b differ."""
    return sum(1 for ca, cb in zip(a.hex, b.hex) if ca != cb)
