"""Deterministic fan-out over processes.

Results come back in task order regardless of worker count, so any code
built on top of `parallel_map` produces identical output for every value
of `jobs`.  Workers receive picklable argument tuples and the function
must be importable (module level), which every caller in this package
satisfies.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, tasks, jobs=1):
    tasks = list(tasks)
    jobs = int(jobs)
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))
