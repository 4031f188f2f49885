"""Bit-string genotypes under standard binary (SC) and reflected Gray (GC) coding.

Layout conventions used everywhere in the package:

* a genotype is a 1-D ``uint8`` array of length ``n_params * n_bits``;
* the first ``n_bits`` bits hold the first parameter, the next block the
  second, and so on;
* inside a block, index 0 is the least-significant bit.

Gray conversion is always applied block by block, never across a whole
genotype, so that Gray structure lines up with parameter boundaries.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import ContractViolation, check_bit_matrix, check_bits

MAX_BITS = 63
# float64 sums of distinct powers of two are exact below 2**53
_FLOAT_EXACT_BITS = 52


class Coding(str, Enum):
    SC = "sc"
    GC = "gc"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ContractViolation(f"unknown coding {value!r}; expected 'sc' or 'gc'") from None

    def other(self):
        return Coding.GC if self is Coding.SC else Coding.SC

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ParamSpec:
    """Search interval ``[lower, upper]`` sampled on an ``n_bits`` grid."""

    lower: float
    upper: float
    n_bits: int

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ContractViolation(f"lower bound {self.lower} must be < upper bound {self.upper}")
        if isinstance(self.n_bits, bool) or int(self.n_bits) != self.n_bits:
            raise ContractViolation(f"n_bits must be an integer, got {self.n_bits!r}")
        if not 1 <= self.n_bits <= MAX_BITS:
            raise ContractViolation(f"n_bits must be in [1, {MAX_BITS}], got {self.n_bits}")

    @property
    def max_index(self):
        """Largest block integer, ``2**n_bits - 1``."""
        return (1 << self.n_bits) - 1

    @property
    def step(self):
        return (self.upper - self.lower) / self.max_index


@dataclass(frozen=True)
class GenotypeLayout:
    n_params: int
    spec: ParamSpec

    def __post_init__(self):
        if isinstance(self.n_params, bool) or int(self.n_params) != self.n_params or self.n_params < 1:
            raise ContractViolation(f"n_params must be a positive integer, got {self.n_params!r}")

    @property
    def n_bits(self):
        return self.spec.n_bits

    @property
    def length(self):
        return self.n_params * self.spec.n_bits


# ---------------------------------------------------------------------------
# bit-level conversions


def _check_blocks(block):
    arr = np.asarray(block)
    return check_bits(arr, name="block") if arr.ndim <= 1 else check_bit_matrix(arr, name="blocks")


def sc_to_gc(block):
    """Standard binary -> Gray, ``g_i = s_{i+1} xor s_i`` with ``s`` above the MSB taken as 0.

    Accepts one block or a 2-D array with one block per row.
    """
    return _sc_to_gc_bits(_check_blocks(block))


def gc_to_sc(block):
    """Gray -> standard binary; running XOR from the most significant bit down."""
    return _gc_to_sc_bits(_check_blocks(block))


def _sc_to_gc_bits(s):
    # works on the last axis of any array
    g = s.copy()
    g[..., :-1] ^= s[..., 1:]
    return g


def _gc_to_sc_bits(g):
    return np.bitwise_xor.accumulate(g[..., ::-1], axis=-1)[..., ::-1].copy()


def gray_to_binary_int(k, n_bits=MAX_BITS):
    """Gray integer(s) to binary integer(s) by shift-xor folding (int64 arrays or ints)."""
    k = np.asarray(k, dtype=np.int64).copy()
    shift = 1
    while shift < n_bits:
        k ^= k >> shift
        shift <<= 1
    return k


def binary_to_gray_int(k):
    k = np.asarray(k, dtype=np.int64)
    return k ^ (k >> 1)


# ---------------------------------------------------------------------------
# decoding


def _block_weights(n_bits):
    if n_bits <= _FLOAT_EXACT_BITS:
        return 2.0 ** np.arange(n_bits)
    return np.left_shift(np.int64(1), np.arange(n_bits, dtype=np.int64))


def block_integers(X, layout, coding):
    """Unsigned integer value of every parameter block.

    ``X`` has shape ``(m, layout.length)``; the result is an ``int64`` array of
    shape ``(m, layout.n_params)``. Not validated; callers pass clean arrays.
    """
    N = layout.n_bits
    blocks = X.reshape(X.shape[0], layout.n_params, N)
    k = blocks @ _block_weights(N)
    k = k.astype(np.int64)
    if Coding.parse(coding) is Coding.GC:
        k = gray_to_binary_int(k, N)
    return k


def integers_to_values(k, spec):
    # measured from the centre so mirrored indices k and M - k decode to exactly
    # mirrored values; the endpoints still land exactly on the bounds
    m = float(spec.max_index)
    centre = 0.5 * (spec.lower + spec.upper)
    half_width = 0.5 * (spec.upper - spec.lower)
    return centre + half_width * ((2.0 * np.asarray(k, dtype=np.float64) - m) / m)


def decode_matrix(X, layout, coding):
    """Decode many genotypes at once; returns ``(m, n_params)`` floats."""
    return integers_to_values(block_integers(X, layout, coding), layout.spec)


def decode_param(block, spec, coding):
    """Real value of a single ``spec.n_bits``-bit block."""
    bits = check_bits(block, length=spec.n_bits, name="block")
    layout = GenotypeLayout(1, spec)
    return float(decode_matrix(bits[np.newaxis, :], layout, coding)[0, 0])


def decode_genotype(genotype, layout, coding):
    bits = check_bits(genotype, length=layout.length, name="genotype")
    return decode_matrix(bits[np.newaxis, :], layout, coding)[0]


def integers_to_bits(k, layout, coding):
    """Inverse of :func:`block_integers`: ``(m, n_params)`` integers to genotypes."""
    k = np.asarray(k, dtype=np.int64)
    if k.ndim == 1:
        k = k[np.newaxis, :]
    if k.shape[1] != layout.n_params:
        raise ContractViolation(f"expected {layout.n_params} integers per row, got {k.shape[1]}")
    if k.size and (k.min() < 0 or k.max() > layout.spec.max_index):
        raise ContractViolation(f"block integers must lie in [0, {layout.spec.max_index}]")
    if Coding.parse(coding) is Coding.GC:
        k = binary_to_gray_int(k)
    shifts = np.arange(layout.n_bits, dtype=np.int64)
    bits = (k[..., np.newaxis] >> shifts) & 1
    return bits.reshape(k.shape[0], layout.length).astype(np.uint8)


def nearest_integers(values, spec):
    """Grid index closest to each real value, clipped to the interval."""
    q = (np.asarray(values, dtype=np.float64) - spec.lower) / (spec.upper - spec.lower)
    k = np.rint(q * spec.max_index)
    return np.clip(k, 0, spec.max_index).astype(np.int64)


# ---------------------------------------------------------------------------
# conversion between codings


def convert_matrix(X, layout, source, target):
    """Re-encode genotypes row-wise without changing any block integer."""
    source, target = Coding.parse(source), Coding.parse(target)
    if source is target:
        return X
    blocks = X.reshape(X.shape[0], layout.n_params, layout.n_bits)
    if target is Coding.GC:
        out = _sc_to_gc_bits(blocks)
    else:
        out = _gc_to_sc_bits(blocks)
    return out.reshape(X.shape)


def convert_genotype(genotype, layout, source, target):
    """Convert one genotype from ``source`` to ``target`` coding, preserving its phenotype."""
    bits = check_bits(genotype, length=layout.length, name="genotype")
    if Coding.parse(source) is Coding.parse(target):
        return bits
    return convert_matrix(bits[np.newaxis, :], layout, source, target)[0]


# ---------------------------------------------------------------------------
# scikit-learn style transformers


class GrayCodeTransformer(TransformerMixin, BaseEstimator):
    """Re-encode rows of a bit matrix between standard binary and Gray coding.

    Parameters
    ----------
    n_bits : int
        Bits per parameter block. Row length must be a multiple of it.
    source, target : {'sc', 'gc'}
        Coding of the input rows and of the output rows.

    ``inverse_transform`` swaps the direction.
    """

    def __init__(self, n_bits=8, source="sc", target="gc"):
        self.n_bits = n_bits
        self.source = source
        self.target = target

    def fit(self, X, y=None):
        X = check_bit_matrix(X)
        if X.shape[1] % self.n_bits:
            raise ContractViolation(f"row length {X.shape[1]} is not a multiple of n_bits={self.n_bits}")
        self.n_features_in_ = X.shape[1]
        self.layout_ = GenotypeLayout(X.shape[1] // self.n_bits, ParamSpec(0.0, 1.0, self.n_bits))
        return self

    def _check(self, X):
        if not hasattr(self, "layout_"):
            self.fit(X)
        return check_bit_matrix(X, n_features=self.layout_.length)

    def transform(self, X):
        X = self._check(X)
        return convert_matrix(X, self.layout_, self.source, self.target).copy()

    def inverse_transform(self, X):
        X = self._check(X)
        return convert_matrix(X, self.layout_, self.target, self.source).copy()


class GenotypeDecoder(TransformerMixin, BaseEstimator):
    """Map bit-string genotypes to real parameter vectors.

    ``transform`` decodes ``(m, n_params * n_bits)`` bits into ``(m, n_params)``
    reals; ``inverse_transform`` snaps reals to the nearest grid point and
    encodes them under ``coding``.
    """

    def __init__(self, lower=0.0, upper=1.0, n_bits=8, coding="sc"):
        self.lower = lower
        self.upper = upper
        self.n_bits = n_bits
        self.coding = coding

    def fit(self, X, y=None):
        X = check_bit_matrix(X)
        if X.shape[1] % self.n_bits:
            raise ContractViolation(f"row length {X.shape[1]} is not a multiple of n_bits={self.n_bits}")
        self.spec_ = ParamSpec(float(self.lower), float(self.upper), int(self.n_bits))
        self.layout_ = GenotypeLayout(X.shape[1] // self.n_bits, self.spec_)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "layout_"):
            self.fit(X)
        X = check_bit_matrix(X, n_features=self.layout_.length)
        return decode_matrix(X, self.layout_, self.coding)

    def inverse_transform(self, values):
        if not hasattr(self, "layout_"):
            raise ContractViolation("GenotypeDecoder must be fitted before inverse_transform")
        values = np.atleast_2d(np.asarray(values, dtype=np.float64))
        return integers_to_bits(nearest_integers(values, self.spec_), self.layout_, self.coding)
