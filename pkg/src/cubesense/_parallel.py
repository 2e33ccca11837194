"""Order-preserving fan-out of independent work chunks."""
from concurrent.futures import ProcessPoolExecutor


def map_chunks(func, chunks, jobs=1):
    """``[func(c) for c in chunks]``, optionally across ``jobs`` processes.

    Results come back in chunk order, so reductions over them do not depend
    on scheduling.
    """
    chunks = list(chunks)
    if jobs is None or jobs <= 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(chunks))) as pool:
        return list(pool.map(func, chunks))
