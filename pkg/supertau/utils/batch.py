"""
Batch and parallel execution of independent checks.
"""
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor

from supertau.models.errors import SupertauError
from supertau.models.report import CheckResult, FAIL, PASS

logger = logging.getLogger(__name__)


def batch_process(items, batch_size=100, process_func=None):
    """
    Process items in batches.

    Args:
        items: List of items to process
        batch_size: Number of items to process in each batch
        process_func: Function to apply to each batch of items

    Returns:
        List of processed results
    """
    if not items:
        return []

    results = []
    for i in range(0, len(items), batch_size):
        batch = items[i:i + batch_size]
        if process_func:
            batch_results = process_func(batch)
            if batch_results:
                results.extend(batch_results)
    return results


def run_check(check_id, func):
    """Evaluate one check; the callable returns a residue (falsy on success).

    A tuple (residue, witness) is also accepted.
    """
    start = time.perf_counter()
    witness = None
    try:
        outcome = func()
        if isinstance(outcome, tuple):
            outcome, witness = outcome
    except SupertauError as e:
        logger.error(f"Check {check_id} raised {type(e).__name__}: {e}")
        return CheckResult(check_id, FAIL, time.perf_counter() - start,
                           residue=f"{type(e).__name__}: {e}")
    runtime = time.perf_counter() - start
    if outcome:
        logger.error(f"Check {check_id} failed")
        return CheckResult(check_id, FAIL, runtime, residue=str(outcome),
                           witness=None if witness is None else str(witness))
    logger.debug(f"Check {check_id} passed in {runtime:.3f}s")
    return CheckResult(check_id, PASS, runtime,
                       witness=None if witness is None else str(witness))


def default_threads():
    value = os.environ.get("SUPERTAU_THREADS")
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def run_checks(checks, threads=None, batch_size=64):
    """
    Run independent checks concurrently.

    Args:
        checks: List of (check_id, callable) pairs
        threads: Worker count (defaults to SUPERTAU_THREADS or the CPU count)
        batch_size: Number of checks submitted per batch

    Returns:
        CheckResults ordered by check id
    """
    threads = threads or default_threads()

    def process(batch):
        if threads == 1:
            return [run_check(check_id, func) for check_id, func in batch]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_check, check_id, func) for check_id, func in batch]
            return [future.result() for future in futures]

    results = batch_process(list(checks), batch_size, process)
    return sorted(results, key=lambda r: r.check_id)
