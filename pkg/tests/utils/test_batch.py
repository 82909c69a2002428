import pytest

from supertau.models.errors import NotInvertible
from supertau.utils.batch import batch_process, run_checks
from supertau.utils.cache import cache_size, cached, clear_cache, clear_cache_for_function

calls = []


@cached
def _cached_square(x):
    calls.append(x)
    return x * x


class TestBatch:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Reset the memo of the test function."""
        calls.clear()
        clear_cache_for_function('_cached_square')
        yield
        clear_cache_for_function('_cached_square')

    def test_batch_process(self):
        """Batches are processed in order and their results concatenated."""
        seen = []

        def process(batch):
            seen.append(len(batch))
            return [x * 2 for x in batch]

        assert batch_process([1, 2, 3, 4, 5], 2, process) == [2, 4, 6, 8, 10]
        assert seen == [2, 2, 1]
        assert batch_process([], 2, process) == []

    @pytest.mark.parametrize('threads', [1, 3])
    def test_run_checks(self, threads):
        """Falsy results pass, residues fail and engine errors become failures."""
        def raises():
            raise NotInvertible("zero series")

        results = run_checks([("c", lambda: None), ("a", lambda: "u'"), ("b", raises)], threads)
        assert [r.check_id for r in results] == ["a", "b", "c"]
        assert results[0].residue == "u'"
        assert "NotInvertible" in results[1].residue
        assert results[2].passed

    def test_cached(self):
        """A cached function runs once per argument."""
        assert _cached_square(3) == 9
        assert _cached_square(3) == 9
        assert _cached_square(4) == 16
        assert calls == [3, 4]
        assert cache_size('_cached_square') == 2

    def test_clear_cache(self):
        """Clearing the whole cache forces a recomputation."""
        _cached_square(5)
        clear_cache()
        assert cache_size() == 0
        assert _cached_square(5) == 25
        assert calls == [5, 5]
