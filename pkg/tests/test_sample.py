import numpy as np
import pytest

from tailcvar.sample import SortedSample


def test_sorted_and_readonly():
    s = SortedSample([3.0, 1.0, 2.0])
    assert list(s.values) == [1.0, 2.0, 3.0]
    assert s.n == len(s) == 3
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_order_stats_and_top():
    s = SortedSample(np.arange(1.0, 11.0))
    assert s.order_stat(1) == 1.0 and s.order_stat(10) == 10.0
    assert list(s.top(3)) == [8.0, 9.0, 10.0]
    assert list(s.descending()[:2]) == [10.0, 9.0]
    with pytest.raises(IndexError):
        s.order_stat(0)
    with pytest.raises(IndexError):
        s.order_stat(11)


def test_source_not_aliased():
    raw = np.array([2.0, 1.0])
    s = SortedSample(raw)
    raw[0] = 100.0
    assert s.values.max() == 2.0


@pytest.mark.parametrize("bad", [[], [1.0, np.nan], [np.inf]])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        SortedSample(bad)


def test_shift_and_scale():
    s = SortedSample([1.0, 2.0])
    assert list(s.shifted(1.5).values) == [2.5, 3.5]
    assert list(s.scaled(2.0).values) == [2.0, 4.0]
    with pytest.raises(ValueError):
        s.scaled(-1.0)
