//! Running many independent analyses at once.
//!
//! With the `parallel` feature (on by default) the work is spread over a
//! rayon thread pool; without it everything runs on the calling thread.
//! Results always come back in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bundle::{ModelBundle, Scenario};
use crate::model::{ElementId, StaticModel};
use crate::region::{make_region, Region, RegionError};
use crate::sim::{simulate, SimError, SimOutcome};

/// Applies `f` to every item, in parallel when the feature is enabled.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// Sequential [`map`].
pub fn map_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn simulate_scenarios(
    bundle: &ModelBundle,
    scenarios: &[Scenario],
) -> Vec<Result<SimOutcome, SimError>> {
    map(scenarios, |s| simulate(bundle, s))
}

pub fn simulate_scenarios_seq(
    bundle: &ModelBundle,
    scenarios: &[Scenario],
) -> Vec<Result<SimOutcome, SimError>> {
    map_seq(scenarios, |s| simulate(bundle, s))
}

pub fn make_regions(
    model: &StaticModel,
    subsets: &[Vec<ElementId>],
) -> Vec<Result<Region, RegionError>> {
    map(subsets, |ids| make_region(model, ids.iter().copied()))
}

pub fn make_regions_seq(
    model: &StaticModel,
    subsets: &[Vec<ElementId>],
) -> Vec<Result<Region, RegionError>> {
    map_seq(subsets, |ids| make_region(model, ids.iter().copied()))
}
