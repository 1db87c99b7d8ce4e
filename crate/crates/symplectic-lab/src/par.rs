//! Minimal deterministic fork-join helper. Results are merged in index
//! order, so outputs never depend on the worker count.

/// Worker count from `SYMPLAB_WORKERS`, defaulting to available parallelism
/// capped at 8.
pub fn worker_count() -> usize {
    std::env::var("SYMPLAB_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get().min(8))
                .unwrap_or(1)
        })
}

/// Applies `f` to every index in `0..count` across scoped threads, returning
/// results in index order.
pub fn parallel_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = worker_count().min(count.max(1));
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let chunk = count.div_ceil(workers);
    let mut per_worker: Vec<Vec<T>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(count);
            if lo >= hi {
                break;
            }
            let f = &f;
            handles.push(scope.spawn(move || (lo..hi).map(f).collect::<Vec<T>>()));
        }
        per_worker = handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect();
    });
    per_worker.into_iter().flatten().collect()
}
