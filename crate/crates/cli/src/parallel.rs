//! Worker-pool expansion of the product side.
//!
//! Factors are dealt round-robin to `jobs` workers. Each worker multiplies
//! its share into a private series, and the partial products are merged in
//! worker order. The arithmetic is exact, so the result does not depend on
//! the worker count or on scheduling.

use std::thread;

use fakemonster_core::denominator::{partial_product, DenominatorError, Factor, LatticeSeries};

pub fn parallel_product(factors: &[Factor], rank: usize, max_height: i64, jobs: usize) -> Result<LatticeSeries, DenominatorError> {
    let jobs = jobs.clamp(1, factors.len().max(1));
    if jobs == 1 {
        return partial_product(factors, rank, max_height);
    }
    let shares: Vec<Vec<Factor>> =
        (0..jobs).map(|w| factors.iter().skip(w).step_by(jobs).cloned().collect()).collect();
    let partials: Vec<Result<LatticeSeries, DenominatorError>> = thread::scope(|s| {
        let handles: Vec<_> =
            shares.iter().map(|share| s.spawn(move || partial_product(share, rank, max_height))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut acc = LatticeSeries::one(rank, max_height);
    for p in partials {
        acc = acc.mul(&p?)?;
    }
    Ok(acc)
}
