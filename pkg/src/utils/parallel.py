from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

from config import config

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(
    fn: Callable[[T], R],
    items: Iterable[T],
    desc: Optional[str] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> List[R]:
    """
    Apply fn to every item on up to `threads` workers, results in input order.

    Args:
        fn: Work function; must not mutate shared state.
        items: Inputs (curves of a sweep, seeds of an ensemble).
        desc: tqdm label.
        threads: Worker cap; defaults to config.worker_count.
        progress: Show a tqdm bar.

    Returns:
        [fn(item) for item in items]
    """
    items = list(items)
    workers = max(1, min(threads or config.worker_count, len(items) or 1))
    bar = tqdm(total=len(items), desc=desc, disable=not progress)
    try:
        if workers == 1:
            results = []
            for item in items:
                results.append(fn(item))
                bar.update(1)
            return results

        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, item) for item in items]
            results = []
            for future in futures:
                results.append(future.result())
                bar.update(1)
            return results
    finally:
        bar.close()
