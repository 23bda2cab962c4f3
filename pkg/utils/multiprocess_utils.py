import logging
import os
from multiprocessing import Queue, Process

logger = logging.getLogger(__name__)


class WorkerError(RuntimeError):
    pass


def chunked_worker(worker_id, map_func, args, results_queue):
    for job_idx, arg in args:
        try:
            results_queue.put((job_idx, map_func(*arg), None))
        except Exception as e:
            logger.exception(f'| worker {worker_id}: job {job_idx} failed')
            results_queue.put((job_idx, None, f'{type(e).__name__}: {e}'))


def chunked_multiprocess_run(map_func, args, num_workers=None, q_max_size=1000):
    """
        Yield map_func(*arg) for every arg, in submission order, so a sweep gives the
        same output for any worker count. A job that raised in a worker raises WorkerError here.
    """
    args = list(enumerate(args))
    n_jobs = len(args)
    if num_workers is None:
        num_workers = int(os.getenv('N_PROC', os.cpu_count()))
    num_workers = max(min(num_workers, n_jobs), 1)
    results_queues = [Queue(maxsize=max(q_max_size // num_workers, 1)) for _ in range(num_workers)]
    workers = []
    for i in range(num_workers):
        p = Process(target=chunked_worker, args=(i, map_func, args[i::num_workers], results_queues[i]), daemon=True)
        workers.append(p)
        p.start()
    done = False
    try:
        for n_finished in range(n_jobs):
            job_idx, res, error = results_queues[n_finished % num_workers].get()
            assert job_idx == n_finished, (job_idx, n_finished)
            if error is not None:
                raise WorkerError(f'Job {job_idx} failed in a worker process: {error}')
            yield res
        done = True
    finally:
        for w in workers:
            if not done and w.is_alive():
                w.terminate()
            w.join()
            w.close()


def multiprocess_map(map_func, args, num_workers=1):
    """Lazy in-process map for num_workers <= 1, worker pool otherwise; always ordered."""
    if num_workers is None or num_workers <= 1:
        return (map_func(*arg) for arg in args)
    return chunked_multiprocess_run(map_func, args, num_workers=num_workers)
