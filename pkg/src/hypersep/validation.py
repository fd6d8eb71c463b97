"""Input validation helpers.

Points of the unit disc are carried around as Python/numpy complex numbers.
These helpers accept the usual spellings (complex scalars, complex arrays,
``(n, 2)`` real arrays of ``[re, im]`` rows, lists of pairs) and normalise
them, rejecting anything on or outside the unit circle.
"""

import numbers

import numpy as np

from .exceptions import EmptyInput, OutsideDisc


def check_disc_point(z, name="z"):
    """Return ``z`` as a Python complex, raising :class:`OutsideDisc` if ``|z| >= 1``."""
    if isinstance(z, (tuple, list, np.ndarray)) and np.size(z) == 2 and not np.iscomplexobj(z):
        z = complex(float(z[0]), float(z[1]))
    if not isinstance(z, numbers.Number):
        raise TypeError(f"{name} must be a number, got {type(z).__name__}")
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise OutsideDisc(f"{name}={z} is not finite")
    if z.real * z.real + z.imag * z.imag >= 1.0:
        raise OutsideDisc(f"{name}={z} is not in the open unit disc")
    return z


def as_complex_array(X):
    """Convert ``X`` to a 1-d complex array without range checks."""
    arr = np.asarray(X)
    if arr.ndim == 0:
        return arr.astype(complex).reshape(1)
    if np.iscomplexobj(arr):
        return arr.astype(complex).ravel()
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0].astype(float) + 1j * arr[:, 1].astype(float)
    if arr.ndim == 1:
        return arr.astype(float).astype(complex)
    raise ValueError(f"cannot interpret array of shape {arr.shape} as disc points")


def check_disc_points(X, allow_empty=False, name="points"):
    """Validate a collection of disc points and return a 1-d complex array.

    Accepts complex sequences or ``(n, 2)`` real arrays.
    """
    if isinstance(X, (list, tuple)) and len(X) == 0:
        arr = np.empty(0, dtype=complex)
    else:
        arr = as_complex_array(X)
    if arr.size == 0:
        if allow_empty:
            return arr
        raise EmptyInput(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise OutsideDisc(f"{name} contains non-finite values")
    mod2 = arr.real ** 2 + arr.imag ** 2
    bad = np.flatnonzero(mod2 >= 1.0)
    if bad.size:
        raise OutsideDisc(f"{name}[{bad[0]}]={arr[bad[0]]} is not in the open unit disc")
    return arr


def points_to_pairs(points):
    """``[[re, im], ...]`` list for JSON output."""
    return [[float(z.real), float(z.imag)] for z in np.atleast_1d(np.asarray(points, dtype=complex))]
