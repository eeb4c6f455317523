//! Symmetry-adapted truncated Fock bases.
//!
//! A basis state stands for the unnormalized combination
//! `|n1 n2 n3 n4> + |n3 n4 n1 n2>` of Fock states. Exchange symmetry fixes
//! `C12 = (n1 - n2) mod 4 = (n3 - n4) mod 4` (0 for singlets, 2 for
//! triplets) and the angular momentum is `M_L = (n1 - n2 + n3 - n4)/4`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::oscillator::FockKet;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Singlet,
    Triplet,
}

impl Symmetry {
    pub fn c12(self) -> u32 {
        match self {
            Symmetry::Singlet => 0,
            Symmetry::Triplet => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Singlet => "singlet",
            Symmetry::Triplet => "triplet",
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "singlet" | "s" | "+" => Ok(Symmetry::Singlet),
            "triplet" | "t" | "-" => Ok(Symmetry::Triplet),
            _ => Err(Error::Parse(format!("unknown symmetry {s:?}"))),
        }
    }
}

/// `(n1 - n2 + n3 - n4)/4`.
pub fn angular_momentum(n: &FockKet) -> Ratio<i64> {
    let [a, b, c, d] = n.0.map(|v| v as i64);
    Ratio::new(a - b + c - d, 4)
}

/// Exchange partner `(n3, n4, n1, n2)`.
pub fn exchange(n: &FockKet) -> FockKet {
    let [a, b, c, d] = n.0;
    FockKet([c, d, a, b])
}

/// Reflection partner `(n2, n1, n4, n3)`, which negates `M_L`.
pub fn reflect(n: &FockKet) -> FockKet {
    let [a, b, c, d] = n.0;
    FockKet([b, a, d, c])
}

/// Fock components of a symmetrized ket with their integer weights.
pub type Components = Vec<(FockKet, f64)>;

fn merge(raw: &[(FockKet, f64)]) -> Components {
    let mut out: Components = Vec::with_capacity(raw.len());
    for &(k, w) in raw {
        match out.iter_mut().find(|(e, _)| *e == k) {
            Some(slot) => slot.1 += w,
            None => out.push((k, w)),
        }
    }
    out.retain(|(_, w)| *w != 0.0);
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Anything the assembler can project operators onto.
pub trait KetBasis {
    fn dim(&self) -> usize;
    fn components(&self, i: usize) -> &[(FockKet, f64)];
    fn total_quanta(&self, i: usize) -> u32;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisState {
    pub n: FockKet,
    pub self_symmetric: bool,
    pub ml: i64,
    pub c12: u32,
}

impl BasisState {
    pub fn components(&self) -> Components {
        merge(&[(self.n, 1.0), (exchange(&self.n), 1.0)])
    }
}

#[derive(Clone, Debug)]
pub struct SymBasis {
    states: Vec<BasisState>,
    comps: Vec<Components>,
    lookup: HashMap<FockKet, usize>,
    pub ml: i64,
    pub symmetry: Symmetry,
    pub n_base: u32,
}

impl SymBasis {
    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the state containing `n` as either component.
    pub fn index_of(&self, n: &FockKet) -> Option<usize> {
        self.lookup.get(n).or_else(|| self.lookup.get(&exchange(n))).copied()
    }

    /// CSV rows `n1,n2,n3,n4,self_symmetric`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n1,n2,n3,n4,self_symmetric")?;
        for s in &self.states {
            let [a, b, c, d] = s.n.0;
            writeln!(w, "{a},{b},{c},{d},{}", s.self_symmetric as u8)?;
        }
        Ok(())
    }

    fn from_states(states: Vec<BasisState>, ml: i64, symmetry: Symmetry, n_base: u32) -> Self {
        let states = order_basis(states);
        let comps = states.iter().map(BasisState::components).collect();
        let lookup = states.iter().enumerate().map(|(i, s)| (s.n, i)).collect();
        Self { states, comps, lookup, ml, symmetry, n_base }
    }
}

impl KetBasis for SymBasis {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn components(&self, i: usize) -> &[(FockKet, f64)] {
        &self.comps[i]
    }

    fn total_quanta(&self, i: usize) -> u32 {
        self.states[i].n.total()
    }
}

/// Whether `n` is the canonical representative of an allowed state.
pub fn is_representative(n: &FockKet, ml: i64, symmetry: Symmetry) -> bool {
    let [a, b, c, d] = n.0;
    if (a + b) % 2 != 0 || (c + d) % 2 != 0 {
        return false;
    }
    let c12 = symmetry.c12() as i64;
    let (a, b, c, d) = (a as i64, b as i64, c as i64, d as i64);
    if (a - b).rem_euclid(4) != c12 || (c - d).rem_euclid(4) != c12 {
        return false;
    }
    if a - b + c - d != 4 * ml {
        return false;
    }
    // Self-symmetric kets carry C12 = 2 M_L mod 4, so they are triplets
    // exactly when M_L is odd.
    a > c || (a == c && b >= d)
}

/// All canonical representatives with `n1 + n2 + n3 + n4 <= n_base`.
pub fn enumerate_basis(ml: i64, symmetry: Symmetry, n_base: u32) -> SymBasis {
    let mut states = Vec::new();
    let nb = n_base as i64;
    for a in 0..=nb {
        for b in 0..=nb - a {
            if (a + b) % 2 != 0 {
                continue;
            }
            for c in 0..=a.min(nb - a - b) {
                let d = a - b + c - 4 * ml;
                if d < 0 || a + b + c + d > nb {
                    continue;
                }
                let n = FockKet([a as u32, b as u32, c as u32, d as u32]);
                if is_representative(&n, ml, symmetry) {
                    states.push(BasisState {
                        self_symmetric: n == exchange(&n),
                        n,
                        ml,
                        c12: symmetry.c12(),
                    });
                }
            }
        }
    }
    SymBasis::from_states(states, ml, symmetry, n_base)
}

/// Total quanta first, then lexicographic `(n1, n2, n3)`.
pub fn order_basis(mut states: Vec<BasisState>) -> Vec<BasisState> {
    states.sort_by_key(|s| (s.n.total(), s.n.0[0], s.n.0[1], s.n.0[2]));
    states
}

/// Estimated dimension `N_base^3 / 192`.
pub fn estimated_size(n_base: u32) -> f64 {
    (n_base as f64).powi(3) / 192.0
}

/// Basis adapted to a field along `x`: the combination
/// `|n>^+ + eps |n2 n1 n4 n3>^+` over all `M_L`.
#[derive(Clone, Debug)]
pub struct StarkBasis {
    pub reps: Vec<FockKet>,
    comps: Vec<Components>,
    pub eps: i8,
    pub symmetry: Symmetry,
    pub n_base: u32,
}

impl StarkBasis {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Largest `|M_L|` among the components.
    pub fn max_ml(&self) -> i64 {
        self.reps
            .iter()
            .map(|n| angular_momentum(n).to_integer().abs())
            .max()
            .unwrap_or(0)
    }
}

impl KetBasis for StarkBasis {
    fn dim(&self) -> usize {
        self.reps.len()
    }

    fn components(&self, i: usize) -> &[(FockKet, f64)] {
        &self.comps[i]
    }

    fn total_quanta(&self, i: usize) -> u32 {
        self.reps[i].total()
    }
}

/// Union over every `M_L` reachable within `n_base`.
pub fn enumerate_all_ml(symmetry: Symmetry, n_base: u32) -> Vec<BasisState> {
    let max_ml = (n_base / 4) as i64;
    (-max_ml..=max_ml)
        .flat_map(|ml| enumerate_basis(ml, symmetry, n_base).states)
        .collect()
}

/// Pairs `+`-kets with their reflections. States whose combination vanishes
/// are dropped; `eps` must be `+1` or `-1`.
pub fn stark_symmetrize(states: &[BasisState], symmetry: Symmetry, n_base: u32, eps: i8) -> Result<StarkBasis, Error> {
    if eps != 1 && eps != -1 {
        return Err(Error::InvalidParameter(format!("eps must be +1 or -1, got {eps}")));
    }
    let canon = |n: &FockKet| {
        let p = exchange(n);
        if is_representative(n, angular_momentum(n).to_integer(), symmetry) {
            *n
        } else {
            p
        }
    };
    let mut seen = std::collections::HashSet::new();
    let mut entries = Vec::new();
    for s in states {
        let n = s.n;
        let partner = canon(&reflect(&n));
        let rep = n.min(partner);
        if !seen.insert(rep) {
            continue;
        }
        let other = if rep == n { partner } else { n };
        let e = eps as f64;
        let comps = merge(&[
            (rep, 1.0),
            (exchange(&rep), 1.0),
            (other, e),
            (exchange(&other), e),
        ]);
        if comps.is_empty() {
            continue;
        }
        entries.push((rep, comps));
    }
    entries.sort_by_key(|(n, _)| (n.total(), n.0[0], n.0[1], n.0[2]));
    let (reps, comps) = entries.into_iter().unzip();
    Ok(StarkBasis { reps, comps, eps, symmetry, n_base })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_singlet_basis() {
        let b = enumerate_basis(0, Symmetry::Singlet, 4);
        let got: Vec<[u32; 4]> = b.states().iter().map(|s| s.n.0).collect();
        assert_eq!(got, vec![[0, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 1], [2, 2, 0, 0]]);
        assert!(b.states()[0].self_symmetric);
        assert_eq!(b.index_of(&FockKet::new(0, 0, 1, 1)), Some(1));
    }

    #[test]
    fn angular_momentum_examples() {
        assert_eq!(angular_momentum(&FockKet::new(0, 0, 0, 0)), Ratio::from_integer(0));
        assert_eq!(angular_momentum(&FockKet::new(4, 0, 0, 0)), Ratio::from_integer(1));
        assert_eq!(angular_momentum(&FockKet::new(2, 0, 2, 0)), Ratio::from_integer(1));
    }

    #[test]
    fn components_merge_self_symmetric() {
        let s = BasisState { n: FockKet::new(1, 1, 1, 1), self_symmetric: true, ml: 0, c12: 0 };
        assert_eq!(s.components(), vec![(FockKet::new(1, 1, 1, 1), 2.0)]);
    }

    #[test]
    fn vacuum_pairs_only_even() {
        let states = enumerate_basis(0, Symmetry::Singlet, 0).states().to_vec();
        assert_eq!(stark_symmetrize(&states, Symmetry::Singlet, 0, 1).unwrap().len(), 1);
        assert_eq!(stark_symmetrize(&states, Symmetry::Singlet, 0, -1).unwrap().len(), 0);
        assert!(stark_symmetrize(&states, Symmetry::Singlet, 0, 2).is_err());
    }

    #[test]
    fn odd_ml_triplets_keep_self_symmetric_kets() {
        let b = enumerate_basis(1, Symmetry::Triplet, 6);
        assert!(b.states().iter().any(|s| s.self_symmetric));
        assert!(enumerate_basis(1, Symmetry::Singlet, 12).states().iter().all(|s| !s.self_symmetric));
        assert!(enumerate_basis(0, Symmetry::Triplet, 12).states().iter().all(|s| !s.self_symmetric));
    }

    #[test]
    fn symmetry_parse() {
        assert_eq!("Singlet".parse::<Symmetry>().unwrap(), Symmetry::Singlet);
        assert_eq!("triplet".parse::<Symmetry>().unwrap(), Symmetry::Triplet);
        assert!("quartet".parse::<Symmetry>().is_err());
    }
}
