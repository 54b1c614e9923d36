//! Reference states with known polynomial magnitudes.

use serde::Serialize;

use crate::catalog::{builtin_catalog, Family};
use crate::contraction::{evaluate, InvariantDescriptor};
use crate::error::Result;
use crate::states::{equal_superposition, MultiSpinorState};

#[derive(Clone, Debug)]
pub struct ExampleState {
    pub name: &'static str,
    /// Equal-weight kets, one digit per party, optional leading `-`.
    pub kets: &'static [&'static str],
    /// Groups of polynomials sharing one magnitude.
    pub magnitudes: &'static [(&'static [&'static str], f64)],
}

impl ExampleState {
    pub fn state(&self) -> Result<MultiSpinorState> {
        equal_superposition(self.kets)
    }

    pub fn n_parties(&self) -> usize {
        self.kets[0].trim_start_matches('-').len()
    }

    pub fn expected(&self, name: &str) -> f64 {
        self.magnitudes
            .iter()
            .find(|(names, _)| names.contains(&name))
            .map(|&(_, v)| v)
            .unwrap_or(0.0)
    }
}

const T_GHZ: &[&str] = &["T_a", "T_c", "T_f", "T_j", "T_k", "T_l", "T_m"];
const Y_GHZ: &[&str] = &["Y_a", "Y_c", "Y_f", "Y_j", "Y_k", "Y_l", "Y_m"];
const TY_GHZ: &[&str] = &[
    "T_a", "T_c", "T_f", "T_j", "T_k", "T_l", "T_m", "Y_a", "Y_c", "Y_f", "Y_j", "Y_k", "Y_l", "Y_m",
];

pub const EXAMPLES: &[ExampleState] = &[
    ExampleState { name: "ghz3_01", kets: &["000", "111"], magnitudes: &[(&["I_3a", "I_3b", "I_3c"], 0.5)] },
    ExampleState { name: "ghz3_21", kets: &["222", "111"], magnitudes: &[(&["I_2a", "I_2b", "I_2c"], 0.5)] },
    ExampleState { name: "ghz3_202", kets: &["202", "111"], magnitudes: &[(&["I_4a", "I_4b", "I_4c"], 0.5)] },
    ExampleState { name: "ghz3_200", kets: &["200", "131"], magnitudes: &[(&["I_5a", "I_5b", "I_5c"], 0.5)] },
    ExampleState {
        name: "ghz3_three_terms",
        kets: &["000", "111", "222"],
        magnitudes: &[
            (&["I_2a", "I_2b", "I_2c", "I_3a", "I_3b", "I_3c"], 2.0 / 9.0),
            (&["I_11a", "I_11b", "I_11c", "I_15a", "I_12b", "I_14c"], 1.0 / 9.0),
        ],
    },
    ExampleState {
        name: "ghz3_four_terms",
        kets: &["000", "111", "222", "333"],
        magnitudes: &[(
            &["I_2a", "I_2b", "I_2c", "I_3a", "I_3b", "I_3c", "I_4b", "I_5c", "I_6c", "I_7a", "I_8b", "I_9a"],
            0.25,
        )],
    },
    ExampleState {
        name: "non_ghz3_w_like",
        kets: &["000", "101", "110", "211"],
        magnitudes: &[(&["I_23a", "I_23b", "I_23c"], 0.25)],
    },
    ExampleState {
        name: "non_ghz3_four_terms",
        kets: &["000", "011", "102", "113"],
        magnitudes: &[(&["I_3a", "I_6a"], 0.5), (&["I_3c", "I_3d", "I_6c", "I_6d"], 0.25)],
    },
    ExampleState { name: "ghz4_01", kets: &["0000", "1111"], magnitudes: &[(&["H_a"], 1.0), (T_GHZ, 0.5)] },
    ExampleState { name: "ghz4_21", kets: &["2222", "1111"], magnitudes: &[(&["H_b"], 1.0), (Y_GHZ, 0.5)] },
    ExampleState { name: "ghz4_c", kets: &["0113", "1000"], magnitudes: &[(&["H_c"], 1.0)] },
    ExampleState { name: "ghz4_d", kets: &["0133", "1002"], magnitudes: &[(&["H_d"], 1.0)] },
    ExampleState {
        name: "ghz4_three_terms",
        kets: &["0000", "1111", "2222"],
        magnitudes: &[(&["H_a", "H_b"], 2.0 / 3.0), (TY_GHZ, 2.0 / 9.0)],
    },
    ExampleState {
        name: "ghz4_four_terms",
        kets: &["0000", "1111", "2222", "3333"],
        magnitudes: &[(&["H_a", "H_b"], 1.0), (TY_GHZ, 0.25)],
    },
    ExampleState {
        name: "cluster4_01",
        kets: &["0000", "-1111", "0011", "1100"],
        magnitudes: &[(&["T_a", "T_b", "T_e"], 0.5), (&["T_c", "T_d", "T_f", "T_g", "T_h", "T_i"], 0.25)],
    },
    ExampleState {
        name: "cluster4_03",
        kets: &["0000", "-3333", "0033", "3300"],
        magnitudes: &[(&["Y_a", "Y_b", "Y_e"], 0.5), (&["Y_c", "Y_d", "Y_f", "Y_g", "Y_h", "Y_i"], 0.25)],
    },
    ExampleState {
        name: "four_spinor_ta_yb",
        kets: &["0222", "2133", "1311", "3000"],
        magnitudes: &[(&["T_a", "Y_b"], 0.25)],
    },
    ExampleState {
        name: "four_spinor_tb_yk",
        kets: &["1122", "2333", "0211", "3000"],
        magnitudes: &[(&["T_b", "Y_k"], 0.25)],
    },
    ExampleState {
        name: "bipartite_ab_cd",
        kets: &["0000", "1111", "0011", "1100"],
        magnitudes: &[
            (&["H_a", "T_a"], 1.0),
            (&["T_b", "T_e", "T_j", "T_k", "T_l", "T_m"], 0.5),
            (&["T_c", "T_d", "T_f", "T_g", "T_h", "T_i"], 0.25),
        ],
    },
    ExampleState {
        name: "bipartite_ad_bc",
        kets: &["0220", "1311", "0310", "1221"],
        magnitudes: &[(&["H_d"], 1.0)],
    },
];

/// Every tagged polynomial that a statement about a state of `n` parties covers.
pub fn polynomials_for(n_parties: usize) -> Result<Vec<InvariantDescriptor>> {
    let families: &[Family] = match n_parties {
        3 => &[Family::ThreeSpinorDeg4],
        4 => &[Family::FourSpinorDeg2, Family::FourSpinorDeg4T, Family::FourSpinorDeg4Y],
        _ => &[],
    };
    let mut out = Vec::new();
    for &f in families {
        out.extend(builtin_catalog(f)?.descriptors);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleCheck {
    pub example: String,
    pub polynomial: String,
    pub expected: f64,
    pub measured: f64,
    pub error: f64,
}

/// Evaluates every covered polynomial on the example state.
pub fn check_example(ex: &ExampleState) -> Result<Vec<ExampleCheck>> {
    let psi = ex.state()?;
    polynomials_for(ex.n_parties())?
        .iter()
        .map(|d| {
            let name = d.label();
            let measured = evaluate(d, &psi)?.norm();
            let expected = ex.expected(&name);
            Ok(ExampleCheck {
                example: ex.name.to_string(),
                error: (measured - expected).abs(),
                polynomial: name,
                expected,
                measured,
            })
        })
        .collect()
}

pub fn find_example(name: &str) -> Option<&'static ExampleState> {
    EXAMPLES.iter().find(|e| e.name == name)
}
