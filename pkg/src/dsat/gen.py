"""Random instance generation with a portable, fully specified PRNG.

The generator must produce byte-identical instances for a given seed no
matter the platform or language, so it uses xoshiro256** seeded by
splitmix64 rather than any library generator.  Reference constants:

* splitmix64: state advances by 0x9E3779B97F4A7C15; each output mixes with
  ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31``.
* xoshiro256**: output is ``rotl(s1 * 5, 7) * 9``; the state update is
  ``t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
  s3 = rotl(s3, 45)``, all modulo 2**64.  The four state words are the
  first four splitmix64 outputs of the seed.

Bounded draws use rejection sampling on the top of the 64-bit range, so
every value below the bound is equally likely.

An instance with M clauses over N variables of cardinality C draws, per
clause, three distinct variables uniformly (redrawing collisions) and, per
variable, a literal whose size is uniform on 1..C-1 and whose states are a
uniform size-subset of the domain (partial Fisher-Yates).
"""

from __future__ import annotations

from dataclasses import dataclass

from .formats import DcnfDocument

MASK64 = (1 << 64) - 1

# clause/variable ratios at the solubility phase transition, per cardinality
TRANSITION_RATIOS = {
    2: 1027 / 240,
    4: 8.1,
    8: 11.9,
    16: 16.1,
    32: 20.8,
    48: 23.2,
    64: 25.6,
}


def transition_ratio(card: int) -> float:
    """Phase-transition clause/variable ratio for a supported cardinality."""
    try:
        return TRANSITION_RATIOS[card]
    except KeyError:
        raise ValueError(f"no transition ratio on record for cardinality {card}") from None


class Xoshiro256:
    """xoshiro256** seeded through splitmix64; see the module docstring."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int) -> None:
        x = seed & MASK64
        words = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & MASK64
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
            words.append(z ^ (z >> 31))
        self.s0, self.s1, self.s2, self.s3 = words

    def next_u64(self) -> int:
        s1 = self.s1
        x = (s1 * 5) & MASK64
        result = (((x << 7) | (x >> 57)) & MASK64) * 9 & MASK64
        t = (s1 << 17) & MASK64
        s2 = self.s2 ^ self.s0
        s3 = self.s3 ^ s1
        self.s1 = s1 ^ s2
        self.s0 = self.s0 ^ s3
        self.s2 = s2 ^ t
        self.s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        return result

    def below(self, bound: int) -> int:
        """Uniform draw from 0..bound-1 by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % bound


@dataclass
class GenSpec:
    var_count: int
    clause_count: int
    card: int
    seed: int

    def __post_init__(self) -> None:
        if self.card < 2:
            raise ValueError("cardinality must be at least 2")
        if self.var_count < 3:
            raise ValueError("need at least 3 variables for 3-variable clauses")
        if self.clause_count < 0:
            raise ValueError("clause count must not be negative")


def sample_literal_states(rng: Xoshiro256, card: int) -> int:
    """Uniform literal state set: size uniform on 1..card-1, states uniform."""
    size = 1 + rng.below(card - 1)
    pool = list(range(card))
    mask = 0
    for i in range(size):
        j = i + rng.below(card - i)
        pool[i], pool[j] = pool[j], pool[i]
        mask |= 1 << pool[i]
    return mask


def generate(spec: GenSpec) -> DcnfDocument:
    """Generate the instance for a spec; same spec, same document."""
    rng = Xoshiro256(spec.seed)
    n = spec.var_count
    card = spec.card
    clauses = []
    for _ in range(spec.clause_count):
        a = rng.below(n)
        b = rng.below(n)
        while b == a:
            b = rng.below(n)
        c = rng.below(n)
        while c == a or c == b:
            c = rng.below(n)
        clause = [(var, sample_literal_states(rng, card)) for var in (a, b, c)]
        clauses.append(clause)
    return DcnfDocument([card] * n, clauses)
