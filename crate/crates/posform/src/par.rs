//! Index-parallel map with a sequential fallback.
//!
//! All data-parallel inner loops in the engine (tensor contraction, batch
//! entry construction, generator sweeps) funnel through [`map_indexed`].
//! With the `parallel` feature (on by default) large loops fan out over
//! rayon; without it the same code degrades to a plain sequential loop.

/// Below this many items the parallel build stays sequential; the loops
/// this gates are too cheap to amortize rayon's splitting overhead.
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 64;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Send + Sync) -> Vec<T> {
    use rayon::prelude::*;
    if len < PAR_MIN_LEN {
        (0..len).map(f).collect()
    } else {
        (0..len).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Send + Sync) -> Vec<T> {
    (0..len).map(f).collect()
}

/// True when this build fans work out over rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(1000, |i| i * 2);
        assert_eq!(v.len(), 1000);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * 2));
    }
}
