"""
Memoization for pure table builders.

Results are keyed by function name and arguments and live for the life of
the process (tables are exact, so nothing ever expires).
"""
import functools
import threading

# Cache storage
_cache = {}
_lock = threading.RLock()


def cached(func):
    """
    Decorator for caching function results.

    Args:
        func: Function whose arguments are hashable

    Returns:
        Decorated function with caching capability
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        key = (func.__name__, args, tuple(sorted(kwargs.items())))
        with _lock:
            if key in _cache:
                return _cache[key]
        result = func(*args, **kwargs)
        with _lock:
            _cache.setdefault(key, result)
            return _cache[key]
    return wrapper


def clear_cache():
    """Clear all cached data."""
    with _lock:
        _cache.clear()


def clear_cache_for_function(func_name):
    """
    Clear cache entries for a specific function.

    Args:
        func_name: Name of the function to clear cache for
    """
    with _lock:
        for key in [k for k in _cache if k[0] == func_name]:
            _cache.pop(key, None)


def cache_size(func_name=None):
    with _lock:
        if func_name is None:
            return len(_cache)
        return sum(1 for k in _cache if k[0] == func_name)
