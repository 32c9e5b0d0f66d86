//! Deterministic fan-out: results come back in index order regardless of `jobs`.

use std::thread;

/// Evaluates `f(0..n)` on up to `jobs` threads, returning results in index order.
pub fn par_map<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = jobs.max(1).min(n.max(1));
    if jobs == 1 {
        return (0..n).map(&f).collect();
    }
    let f = &f;
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    thread::scope(|s| {
        let chunks: Vec<_> = slots
            .chunks_mut(n.div_ceil(jobs))
            .enumerate()
            .map(|(c, chunk)| {
                let start = c * n.div_ceil(jobs);
                s.spawn(move || {
                    for (off, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(f(start + off));
                    }
                })
            })
            .collect();
        for h in chunks {
            h.join().expect("worker panicked");
        }
    });
    slots.into_iter().map(|s| s.expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_jobs() {
        let one = par_map(37, 1, |i| i * i);
        for jobs in [2, 3, 8, 100] {
            assert_eq!(par_map(37, jobs, |i| i * i), one);
        }
        assert!(par_map(0, 4, |i| i).is_empty());
    }
}
