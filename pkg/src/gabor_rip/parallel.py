"""Order-preserving worker pool used by the estimators and sweeps."""
import os
from concurrent.futures import ProcessPoolExecutor

JOBS_ENV = "GABOR_RIP_JOBS"


def default_jobs():
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run_chunks(fn, items, jobs=1):
    """``[fn(item) for item in items]``, optionally across processes.

    Results come back in input order, so reductions over them are identical
    for every ``jobs`` value.
    """
    items = list(items)
    jobs = max(1, int(jobs or 1))
    if jobs == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
