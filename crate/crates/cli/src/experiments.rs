//! Experiments shipped with the binary; `run heat_k2_ll1` finds them by name.

pub const BUNDLED: &[(&str, &str)] = &[
    ("counterexample_k2", include_str!("../experiments/counterexample_k2.toml")),
    ("heat_k2_arctan", include_str!("../experiments/heat_k2_arctan.toml")),
    ("heat_k2_ll1", include_str!("../experiments/heat_k2_ll1.toml")),
    ("heat_k2_sr2", include_str!("../experiments/heat_k2_sr2.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
