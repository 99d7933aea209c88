"""Immutable ascending-ordered sample with order-statistic access."""
import numpy as np

from .errors import DataError


class SortedSample:
    """Observations sorted in non-decreasing order.

    Order statistics follow the 1-based convention ``X_(1,n) <= ... <= X_(n,n)``.
    The underlying array is read-only; slicing helpers return read-only views.

    Parameters
    ----------
    values : array_like
        Finite real observations, in any order.
    assume_sorted : bool
        Skip sorting when the caller guarantees ascending order.
    """

    __slots__ = ("_x",)

    def __init__(self, values, assume_sorted=False):
        x = np.array(values, dtype=float, copy=True).ravel()
        if x.size == 0:
            raise DataError("a sample needs at least one observation")
        if not np.all(np.isfinite(x)):
            raise DataError("sample contains NaN or infinite values")
        if not assume_sorted:
            x.sort(kind="stable")
        x.setflags(write=False)
        self._x = x

    @property
    def values(self):
        return self._x

    @property
    def n(self):
        return self._x.size

    def __len__(self):
        return self._x.size

    def __repr__(self):
        return f"SortedSample(n={self.n}, min={self._x[0]:.6g}, max={self._x[-1]:.6g})"

    def order_stat(self, i):
        """Return ``X_(i,n)`` for ``1 <= i <= n``."""
        if not 1 <= i <= self.n:
            raise IndexError(f"order statistic index {i} outside 1..{self.n}")
        return float(self._x[i - 1])

    def top(self, k):
        """The ``k`` largest observations in ascending order."""
        if not 0 <= k <= self.n:
            raise IndexError(f"cannot take top {k} of {self.n} observations")
        return self._x[self.n - k:]

    def descending(self):
        return self._x[::-1]

    def shifted(self, c):
        return SortedSample(self._x + c, assume_sorted=True)

    def scaled(self, c):
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return SortedSample(self._x * c, assume_sorted=True)
