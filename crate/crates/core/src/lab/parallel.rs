use std::ops::Range;
use std::thread;

/// Splits `0..total` into at most `parts` contiguous, nonempty, ordered ranges.
pub(crate) fn split(total: u64, parts: usize) -> Vec<Range<u64>> {
    let parts = (parts.max(1) as u64).min(total.max(1));
    let base = total / parts;
    let extra = total % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let len = base + u64::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Runs `work` over contiguous chunks of `0..total` on `workers` threads and
/// returns the per-chunk results in chunk order.
pub(crate) fn map_chunks<T, F>(total: u64, workers: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let chunks = split(total, workers);
    if chunks.len() <= 1 {
        return chunks.into_iter().map(&work).collect();
    }
    let work = &work;
    thread::scope(|s| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|range| s.spawn(move || work(range)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
