//! Fork-join helper. With `std` the two closures may run on separate scoped
//! threads; without it they run in order. Results never depend on which path
//! was taken.

#[cfg(feature = "std")]
pub(crate) fn join<A, B, RA, RB>(parallel: bool, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    if !parallel {
        return (a(), b());
    }
    std::thread::scope(|s| {
        let hb = s.spawn(b);
        let ra = a();
        let rb = match hb.join() {
            Ok(v) => v,
            Err(payload) => std::panic::resume_unwind(payload),
        };
        (ra, rb)
    })
}

#[cfg(not(feature = "std"))]
pub(crate) fn join<A, B, RA, RB>(_parallel: bool, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    (a(), b())
}

/// Threads actually used for a request of `workers`: at least one, at most
/// the hardware parallelism. Callers must not let results depend on it.
#[cfg(feature = "std")]
pub(crate) fn threads(workers: usize) -> usize {
    static HARDWARE: std::sync::OnceLock<usize> = std::sync::OnceLock::new();
    let hw = *HARDWARE.get_or_init(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    workers.clamp(1, hw)
}

#[cfg(not(feature = "std"))]
pub(crate) fn threads(_workers: usize) -> usize {
    1
}
