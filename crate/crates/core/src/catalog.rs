//! Named descriptor families, parsed from their printed index notation.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::clifford::XTag;
use crate::contraction::{parse_index_notation, InvariantDescriptor, Pair, SlotRef};
use crate::error::{Error, Result};

const THREE_SPINOR: &str = include_str!("../data/three_spinor_deg4.txt");
const FOUR_SPINOR_DEG2: &str = include_str!("../data/four_spinor_deg2.txt");
const FOUR_SPINOR_DEG4: &str = include_str!("../data/four_spinor_deg4.txt");
const FIVE_SPINOR: &str = include_str!("../data/five_spinor_deg4_patterns.txt");

/// Index repairs for printed five-spinor patterns that reuse one letter twice
/// and drop another. Each entry is (name, printed factor, repaired factor).
pub const FIVE_SPINOR_REPAIRS: [(&str, &str, &str); 3] = [
    ("F_22", "X_{ix}X_{ty}", "X_{nx}X_{ty}"),
    ("F_23", "X_{is}X_{ty}", "X_{ns}X_{ty}"),
    ("F_32", "X_{nx}X_{ty}", "X_{nx}X_{to}"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    ThreeSpinorDeg4,
    FourSpinorDeg2,
    FourSpinorDeg4T,
    FourSpinorDeg4Y,
    FiveSpinorDeg4Patterns,
    EvenNDeg2(usize),
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub family: Family,
    pub descriptors: Vec<InvariantDescriptor>,
    /// False when tags are placeholders (pattern-only families).
    pub tags_assigned: bool,
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&InvariantDescriptor> {
        self.descriptors.iter().find(|d| d.name.as_deref() == Some(name))
    }

    pub fn names(&self) -> Vec<String> {
        self.descriptors.iter().map(|d| d.label()).collect()
    }
}

/// Raw `(name, notation)` lines of a data file.
pub fn printed_lines(text: &str) -> Vec<(&str, &str)> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_once(' ').expect("name and notation"))
        .collect()
}

fn parse_family(text: &str) -> Vec<InvariantDescriptor> {
    printed_lines(text)
        .into_iter()
        .map(|(name, notation)| {
            parse_index_notation(notation)
                .and_then(|p| p.into_descriptor(XTag::C, Some(name.to_string())))
                .unwrap_or_else(|e| panic!("bundled catalog entry {name} is malformed: {e}"))
        })
        .collect()
}

/// Printed five-spinor pattern text with the index repairs applied.
pub fn repaired_five_spinor_notation(name: &str, printed: &str) -> String {
    FIVE_SPINOR_REPAIRS
        .iter()
        .filter(|(n, _, _)| *n == name)
        .fold(printed.to_string(), |acc, (_, from, to)| acc.replacen(from, to, 1))
}

fn five_spinor_patterns() -> Vec<InvariantDescriptor> {
    printed_lines(FIVE_SPINOR)
        .into_iter()
        .map(|(name, notation)| {
            parse_index_notation(&repaired_five_spinor_notation(name, notation))
                .and_then(|p| p.into_descriptor(XTag::C, Some(name.to_string())))
                .unwrap_or_else(|e| panic!("bundled pattern {name} is malformed: {e}"))
        })
        .collect()
}

/// All `2ⁿ` tag choices on the single degree-2 pairing, each pair running
/// from copy 1 to copy 0. Names list the tags party by party, e.g. `E4[C,C5,C,C]`.
pub fn even_n_deg2(n: usize) -> Result<Vec<InvariantDescriptor>> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("even party count ≥ 2 required, got {n}")));
    }
    (0..1usize << n)
        .map(|mask| {
            let tags: Vec<XTag> =
                (0..n).map(|p| if mask >> (n - 1 - p) & 1 == 1 { XTag::C5 } else { XTag::C }).collect();
            let pairs = tags
                .iter()
                .enumerate()
                .map(|(p, &x)| Pair { from: SlotRef { copy: 1, party: p }, to: SlotRef { copy: 0, party: p }, x })
                .collect();
            let label: Vec<&str> = tags.iter().map(|t| t.label()).collect();
            InvariantDescriptor::new(n, 2, pairs, Some(format!("E{n}[{}]", label.join(","))))
        })
        .collect()
}

pub fn builtin_catalog(family: Family) -> Result<Catalog> {
    static CACHE: OnceLock<HashMap<&'static str, Vec<InvariantDescriptor>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        let mut m = HashMap::new();
        m.insert("three", parse_family(THREE_SPINOR));
        m.insert("h", parse_family(FOUR_SPINOR_DEG2));
        let ty = parse_family(FOUR_SPINOR_DEG4);
        m.insert("t", ty.iter().filter(|d| d.label().starts_with("T_")).cloned().collect());
        m.insert("y", ty.iter().filter(|d| d.label().starts_with("Y_")).cloned().collect());
        m.insert("five", five_spinor_patterns());
        m
    });
    let (descriptors, tags_assigned) = match family {
        Family::ThreeSpinorDeg4 => (cache["three"].clone(), true),
        Family::FourSpinorDeg2 => (cache["h"].clone(), true),
        Family::FourSpinorDeg4T => (cache["t"].clone(), true),
        Family::FourSpinorDeg4Y => (cache["y"].clone(), true),
        Family::FiveSpinorDeg4Patterns => (cache["five"].clone(), false),
        Family::EvenNDeg2(n) => (even_n_deg2(n)?, true),
    };
    Ok(Catalog { family, descriptors, tags_assigned })
}

/// Looks a name up across the tagged built-in families.
pub fn lookup(name: &str) -> Result<InvariantDescriptor> {
    let families = [Family::ThreeSpinorDeg4, Family::FourSpinorDeg2, Family::FourSpinorDeg4T, Family::FourSpinorDeg4Y];
    for f in families {
        if let Some(d) = builtin_catalog(f)?.get(name) {
            return Ok(d.clone());
        }
    }
    if let Some(rest) = name.strip_prefix('E') {
        if let Some((n, _)) = rest.split_once('[') {
            if let Ok(n) = n.parse::<usize>() {
                if let Some(d) = even_n_deg2(n)?.into_iter().find(|d| d.name.as_deref() == Some(name)) {
                    return Ok(d);
                }
            }
        }
    }
    Err(Error::UnknownName(name.to_string()))
}

/// Group number and pattern letter of a three-spinor name such as `I_27d`.
pub fn split_three_spinor_name(name: &str) -> Result<(u32, char)> {
    let body = name.strip_prefix("I_").ok_or_else(|| Error::UnknownName(name.into()))?;
    let letter = body.chars().last().ok_or_else(|| Error::UnknownName(name.into()))?;
    let group: u32 = body[..body.len() - 1].parse().map_err(|_| Error::UnknownName(name.into()))?;
    if !('a'..='d').contains(&letter) || !(2..=38).contains(&group) || group == 13 {
        return Err(Error::UnknownName(name.into()));
    }
    Ok((group, letter))
}

/// Expected sign of a three-spinor polynomial under γ⁰ at each party.
pub fn parity_class(name: &str) -> Result<[i8; 3]> {
    let (group, _) = split_three_spinor_name(name)?;
    Ok(match group {
        2..=9 => [1, 1, 1],
        10 | 16 | 17 | 18 => [1, -1, 1],
        19..=22 => [1, 1, -1],
        23..=26 => [-1, 1, 1],
        27..=30 => [-1, 1, -1],
        31..=34 => [-1, -1, 1],
        35..=38 => [1, -1, -1],
        11 | 12 | 14 | 15 => [-1, -1, -1],
        _ => return Err(Error::UnknownName(name.into())),
    })
}

/// The eight parity classes with their group numbers and expected ranks.
pub fn parity_classes() -> Vec<([i8; 3], Vec<u32>, usize)> {
    vec![
        ([1, 1, 1], (2..=9).collect(), 23),
        ([1, -1, 1], vec![10, 16, 17, 18], 8),
        ([1, 1, -1], (19..=22).collect(), 8),
        ([-1, 1, 1], (23..=26).collect(), 8),
        ([-1, 1, -1], (27..=30).collect(), 5),
        ([-1, -1, 1], (31..=34).collect(), 5),
        ([1, -1, -1], (35..=38).collect(), 5),
        ([-1, -1, -1], vec![11, 12, 14, 15], 5),
    ]
}
