//! Example models shipped with the crate.

/// Bill compares his height with his father's.
pub const BILL: &str = include_str!("../fixtures/bill.tm");
/// Sales contract with accept, reject and cancel scenarios.
pub const CONTRACT: &str = include_str!("../fixtures/contract.tm");
/// Pedestrian crossing with green and red scenarios.
pub const CROSSING: &str = include_str!("../fixtures/crossing.tm");
pub const COFFEE: &str = include_str!("../fixtures/coffee.tm");
pub const WALKING: &str = include_str!("../fixtures/walking.tm");
/// An utterance that exists and a meaning that only subsists.
pub const LEKTA: &str = include_str!("../fixtures/lekta.tm");

/// `(file name, text)` for every fixture.
pub const ALL: [(&str, &str); 6] = [
    ("bill.tm", BILL),
    ("contract.tm", CONTRACT),
    ("crossing.tm", CROSSING),
    ("coffee.tm", COFFEE),
    ("walking.tm", WALKING),
    ("lekta.tm", LEKTA),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::check_bundle;
    use crate::parse::parse_model;
    use crate::sim::simulate;

    #[test]
    fn fixtures_are_clean() {
        for (name, text) in ALL {
            let bundle = parse_model(text).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            let diags = check_bundle(&bundle);
            assert!(diags.is_empty(), "{name}: {diags:#?}");
            for scenario in &bundle.scenarios {
                let run = simulate(&bundle, scenario)
                    .unwrap_or_else(|e| panic!("{name}/{}: {e:?}", scenario.name));
                assert!(run.warnings.is_empty(), "{name}/{}: {:?}", scenario.name, run.warnings);
            }
        }
    }
}
