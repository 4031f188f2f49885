"""Exceptions and input validation helpers shared across the package."""

import numpy as np


class ContractViolation(ValueError):
    """Raised when an operation is called outside its documented preconditions."""


class ConfigError(ValueError):
    """Raised for unknown or malformed experiment configuration entries."""


class EnumerationBudgetError(ContractViolation):
    """Raised when an exhaustive landscape census would exceed its bit budget."""


def check_bits(bits, length=None, name="bits"):
    """Return ``bits`` as a 1-D ``uint8`` array of zeros and ones.

    Parameters
    ----------
    bits : array-like
        Sequence of binary digits.
    length : int, optional
        Required length. A mismatch raises :class:`ContractViolation`.
    name : str
        Used in error messages.
    """
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ContractViolation(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ContractViolation(f"{name} must hold at least one bit")
    if arr.dtype != np.uint8:
        if not np.all((arr == 0) | (arr == 1)):
            raise ContractViolation(f"{name} may only contain 0 and 1")
        arr = arr.astype(np.uint8)
    elif arr.max(initial=0) > 1:
        raise ContractViolation(f"{name} may only contain 0 and 1")
    if length is not None and arr.shape[0] != length:
        raise ContractViolation(f"{name} has length {arr.shape[0]}, expected {length}")
    return arr


def check_bit_matrix(X, n_features=None, name="X"):
    """2-D counterpart of :func:`check_bits`; rows are genotypes."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D (n_samples, n_bits), got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.all((arr == 0) | (arr == 1)):
            raise ContractViolation(f"{name} may only contain 0 and 1")
        arr = arr.astype(np.uint8)
    elif arr.size and arr.max() > 1:
        raise ContractViolation(f"{name} may only contain 0 and 1")
    if n_features is not None and arr.shape[1] != n_features:
        raise ContractViolation(f"{name} has {arr.shape[1]} bits per row, expected {n_features}")
    return arr


def check_probability(value, name):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ContractViolation(f"{name} must lie in [0, 1], got {value}")
    return value


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value:
        raise ContractViolation(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ContractViolation(f"{name} must be >= {minimum}, got {value}")
    return value


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator`` (PCG64).

    ``None`` gives fresh OS entropy, an int seeds a new generator and an
    existing ``Generator`` is returned unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (int, np.integer)):
        return np.random.Generator(np.random.PCG64(seed))
    raise ContractViolation(f"cannot build a random generator from {seed!r}")
