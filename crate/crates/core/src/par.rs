//! Data-parallel sweeps over finite product domains.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or after `set_parallel(false)`, the same code runs on the
//! calling thread. Results are always merged in canonical order, so output
//! never depends on scheduling.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Runtime switch between the rayon path and the sequential fallback.
/// Has no effect when the crate is built without `parallel`.
pub fn set_parallel(enabled: bool) {
    FORCE_SEQUENTIAL.store(!enabled, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

pub fn domain_size(dims: &[usize]) -> u128 {
    dims.iter().map(|&d| d as u128).product()
}

/// Ordered map over `0..len`.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// Ordered filter-map over a slice.
pub fn filter_map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return items.par_iter().filter_map(f).collect();
    }
    items.iter().filter_map(f).collect()
}

// Leading coordinates that get split across tasks; the rest run as an
// odometer loop with one reusable buffer.
fn split_point(dims: &[usize]) -> usize {
    let mut prod = 1usize;
    for (i, &d) in dims.iter().enumerate() {
        if i + 1 == dims.len() || prod >= 256 {
            return i;
        }
        prod = prod.saturating_mul(d);
    }
    0
}

fn chunk<A, F>(dims: &[usize], split: usize, outer: usize, init: A, fold: &F) -> A
where
    F: Fn(A, &[usize]) -> A,
{
    let mut tuple = vec![0usize; dims.len()];
    let mut rem = outer;
    for i in (0..split).rev() {
        tuple[i] = rem % dims[i];
        rem /= dims[i];
    }
    let mut acc = init;
    loop {
        acc = fold(acc, &tuple);
        let mut i = dims.len();
        loop {
            if i == split {
                return acc;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < dims[i] {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// Folds every tuple of `dims` (lexicographic order, first coordinate most
/// significant). Chunk results are combined left to right.
pub fn sweep_fold<A, I, F, C>(dims: &[usize], identity: I, fold: F, combine: C) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, &[usize]) -> A + Sync + Send,
    C: Fn(A, A) -> A + Sync + Send,
{
    if dims.contains(&0) {
        return identity();
    }
    if dims.is_empty() {
        return fold(identity(), &[]);
    }
    let split = split_point(dims);
    let outer: usize = dims[..split].iter().product();
    let parts = map_range(outer, |o| chunk(dims, split, o, identity(), &fold));
    parts.into_iter().fold(identity(), &combine)
}

/// Collects `f`'s `Some` results over the whole domain, in canonical order.
pub fn sweep<T, F>(dims: &[usize], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[usize]) -> Option<T> + Sync + Send,
{
    sweep_fold(
        dims,
        Vec::new,
        |mut acc, x| {
            if let Some(v) = f(x) {
                acc.push(v);
            }
            acc
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}

/// Number of tuples on which `pred` holds.
pub fn sweep_count<F>(dims: &[usize], pred: F) -> u64
where
    F: Fn(&[usize]) -> bool + Sync + Send,
{
    sweep_fold(dims, || 0u64, |acc, x| acc + pred(x) as u64, |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_visits_lexicographically() {
        let all = sweep(&[2, 3], |x| Some(x.to_vec()));
        assert_eq!(
            all,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
    }

    #[test]
    fn sweep_large_split_matches_sequential() {
        let dims = [7, 9, 5, 3];
        let par = sweep(&dims, |x| Some(x.iter().sum::<usize>()));
        let mut seq = Vec::new();
        for a in 0..7 {
            for b in 0..9 {
                for c in 0..5 {
                    for d in 0..3 {
                        seq.push(a + b + c + d);
                    }
                }
            }
        }
        assert_eq!(par, seq);
        assert_eq!(sweep_count(&dims, |x| x[0] == 0), 9 * 5 * 3);
    }

    #[test]
    fn empty_dimension_yields_nothing() {
        assert!(sweep(&[3, 0, 2], |x| Some(x.to_vec())).is_empty());
        assert_eq!(sweep(&[], |x| Some(x.len())), vec![0]);
    }
}
