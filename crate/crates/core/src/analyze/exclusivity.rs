use crate::bundle::ModelBundle;
use crate::diag::{Code, Diagnostic};

/// Static checks on exclusivity pairs. Whether a run respects them is the
/// simulator's business.
pub fn check_exclusivity(bundle: &ModelBundle) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (index, pair) in bundle.exclusive.iter().enumerate() {
        let pos = bundle.source.exclusive.get(index).copied();
        let mut missing = false;
        for name in [&pair.a, &pair.b] {
            if bundle.event(name).is_none() {
                missing = true;
                out.push(
                    Diagnostic::new(
                        Code::UnknownEvent,
                        format!("exclusive pair names undeclared event `{name}`"),
                    )
                    .at_opt(pos),
                );
            }
        }
        if missing {
            continue;
        }
        if pair.a == pair.b {
            out.push(
                Diagnostic::new(
                    Code::ExclusiveSame,
                    format!("`{}` cannot exclude itself", pair.a),
                )
                .at_opt(pos),
            );
            continue;
        }
        let a = bundle.event(&pair.a).expect("checked");
        let b = bundle.event(&pair.b).expect("checked");
        if a.region.elements() == b.region.elements() {
            out.push(
                Diagnostic::new(
                    Code::SelfExclusive,
                    format!("`{}` and `{}` cover the same region", pair.a, pair.b),
                )
                .at_opt(pos),
            );
        }
    }
    out
}
