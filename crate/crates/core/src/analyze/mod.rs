//! Well-formedness checks and existence/subsistence classification.

mod classify;
mod exclusivity;
mod validate;

pub use classify::{classify_at, classify_elements, merge_spans, ClassifyError, OntClass};
pub use exclusivity::check_exclusivity;
pub use validate::{check_region_mappable, stage_allowed, validate_static, Mappability};

use crate::bundle::ModelBundle;
use crate::diag::Diagnostic;

/// Every static finding for a bundle: structure, then exclusivity pairs.
pub fn check_bundle(bundle: &ModelBundle) -> Vec<Diagnostic> {
    let mut diags = validate_static(bundle);
    diags.extend(check_exclusivity(bundle));
    diags
}
