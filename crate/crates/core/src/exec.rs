//! Execution strategy for grid sweeps.
//!
//! With the `parallel` feature (on by default) sweeps are spread over the
//! rayon pool; without it, or with [`Execution::Serial`], they run on the
//! calling thread. Results always come back in input order so every
//! reduction downstream is deterministic.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub(crate) fn map_ordered<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let xs: Vec<u32> = (0..1000).collect();
        let a = map_ordered(Execution::Serial, &xs, |x| x * 3);
        let b = map_ordered(Execution::Parallel, &xs, |x| x * 3);
        assert_eq!(a, b);
        assert_eq!(a[999], 2997);
    }
}
