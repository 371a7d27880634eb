use super::ButcherTableau;
use crate::error::{Error, Result};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "explicit-euler",
    "radau-iia-2",
    "radau-ia-2",
    "hammer-hollingsworth-2",
];

/// Looks up a built-in corrector tableau by name.
pub fn builtin(name: &str) -> Result<ButcherTableau> {
    let t = match name {
        "explicit-euler" => ButcherTableau::new(name, 1, vec![vec![0.0]], vec![1.0], vec![0.0]),
        "radau-iia-2" => ButcherTableau::new(
            name,
            3,
            vec![vec![5.0 / 12.0, -1.0 / 12.0], vec![3.0 / 4.0, 1.0 / 4.0]],
            vec![3.0 / 4.0, 1.0 / 4.0],
            vec![1.0 / 3.0, 1.0],
        ),
        "radau-ia-2" => ButcherTableau::new(
            name,
            3,
            vec![vec![1.0 / 4.0, -1.0 / 4.0], vec![1.0 / 4.0, 5.0 / 12.0]],
            vec![1.0 / 4.0, 3.0 / 4.0],
            vec![0.0, 2.0 / 3.0],
        ),
        // 2-stage Gauss method.
        "hammer-hollingsworth-2" => {
            let r = 3f64.sqrt() / 6.0;
            ButcherTableau::new(
                name,
                4,
                vec![vec![0.25, 0.25 - r], vec![0.25 + r, 0.25]],
                vec![0.5, 0.5],
                vec![0.5 - r, 0.5 + r],
            )
        }
        _ => return Err(Error::UnknownMethod(name.to_string())),
    };
    Ok(t.expect("built-in tableaux satisfy their invariants"))
}
