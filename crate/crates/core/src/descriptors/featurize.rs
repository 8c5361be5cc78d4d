//! Deterministic hashed SMILES features, used when no pretrained embedding
//! file is available.

use std::collections::HashMap;

use super::smiles::{tokenize_smiles, SmilesTokenStream, TokenKind};
use super::ComponentDescriptor;
use crate::error::{Error, Result};

pub const DEFAULT_FEATURE_SEED: u64 = 0x6e7a_5f1c_2b3d_4a59;
pub const MIN_DIM: usize = 16;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(seed: u64, name: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes().iter().chain(name.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    // splitmix64 finalizer, spreads FNV's weak low bits
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Named numeric features extracted from a token stream.
///
/// Bonds are resolved through branches and ring closures, so pair features
/// follow the molecular graph rather than the string order. Atoms are labeled
/// by their token text and heavy-atom degree.
pub fn raw_features(ts: &SmilesTokenStream) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = vec![("bias".into(), 1.0)];
    let mut atoms: Vec<&str> = Vec::new();
    let mut edges: Vec<(usize, usize, Option<char>)> = Vec::new();
    let mut depth = 0usize;
    let mut max_depth = 0usize;
    let mut depth_sum = 0usize;
    let mut rings = 0usize;
    let mut branches = 0usize;
    let mut aromatic = 0usize;
    let mut charge = 0i64;
    let mut prev: Option<usize> = None;
    let mut stack: Vec<Option<usize>> = Vec::new();
    let mut open_rings: HashMap<u16, (usize, Option<char>)> = HashMap::new();
    let mut pending_bond: Option<char> = None;

    for t in &ts.tokens {
        match &t.kind {
            TokenKind::Atom { .. } | TokenKind::Bracket(_) => {
                let idx = atoms.len();
                atoms.push(&t.text);
                depth_sum += depth;
                if t.is_aromatic_atom() {
                    aromatic += 1;
                }
                if let TokenKind::Bracket(b) = &t.kind {
                    charge += i64::from(b.charge);
                    out.push((format!("hcount:{}", b.symbol), f64::from(b.hydrogens)));
                }
                out.push((format!("atom:{}", t.text), 1.0));
                if let Some(p) = prev {
                    edges.push((p, idx, pending_bond));
                }
                prev = Some(idx);
                pending_bond = None;
            }
            TokenKind::Bond(c) => {
                pending_bond = Some(*c);
                out.push((format!("bond:{c}"), 1.0));
            }
            TokenKind::RingClosure(label) => {
                if let Some(p) = prev {
                    match open_rings.remove(label) {
                        Some((q, bond)) => {
                            edges.push((q, p, pending_bond.or(bond)));
                            rings += 1;
                        }
                        None => {
                            open_rings.insert(*label, (p, pending_bond));
                        }
                    }
                }
                pending_bond = None;
            }
            TokenKind::BranchOpen => {
                branches += 1;
                depth += 1;
                max_depth = max_depth.max(depth);
                stack.push(prev);
            }
            TokenKind::BranchClose => {
                depth = depth.saturating_sub(1);
                prev = stack.pop().flatten();
            }
            TokenKind::Dot => {
                prev = None;
                out.push(("fragment".into(), 1.0));
            }
        }
    }

    let mut degree = vec![0usize; atoms.len()];
    for &(a, b, _) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let label = |i: usize| format!("{}/{}", atoms[i], degree[i]);
    let mut neighbours: Vec<Vec<String>> = vec![Vec::new(); atoms.len()];
    for &(a, b, bond) in &edges {
        let bond = bond.map(String::from).unwrap_or_default();
        neighbours[a].push(format!("{bond}{}", label(b)));
        neighbours[b].push(format!("{bond}{}", label(a)));
    }
    for (i, nb) in neighbours.iter_mut().enumerate() {
        nb.sort();
        out.push((format!("env:{}", label(i)), 1.0));
        out.push((format!("env1:{}[{}]", label(i), nb.join(",")), 1.0));
    }
    for &(a, b, bond) in &edges {
        let (la, lb) = (label(a), label(b));
        let (lo, hi) = if la <= lb { (la, lb) } else { (lb, la) };
        let bond = bond.map(String::from).unwrap_or_default();
        out.push((format!("pair:{lo}{bond}{hi}"), 1.0));
    }

    let n_atoms = atoms.len();
    out.push(("heavy_atoms".into(), n_atoms as f64));
    out.push(("rings".into(), rings as f64));
    out.push(("branches".into(), branches as f64));
    out.push(("branch_depth_max".into(), max_depth as f64));
    if n_atoms > 0 {
        out.push(("branch_depth_mean".into(), depth_sum as f64 / n_atoms as f64));
    }
    out.push(("aromatic_atoms".into(), aromatic as f64));
    out.push(("net_charge".into(), charge as f64));
    out
}

/// Hashes the token-derived features into `dim` signed buckets and scales
/// the result to unit L2 norm.
pub fn featurize(smiles: &str, dim: usize) -> Result<ComponentDescriptor> {
    featurize_with_seed(smiles, dim, DEFAULT_FEATURE_SEED)
}

pub fn featurize_with_seed(smiles: &str, dim: usize, seed: u64) -> Result<ComponentDescriptor> {
    if dim < MIN_DIM {
        return Err(Error::Invalid(format!(
            "descriptor dimension must be at least {MIN_DIM}, got {dim}"
        )));
    }
    let ts = tokenize_smiles(smiles)?;
    let mut v = vec![0.0; dim];
    for (name, value) in raw_features(&ts) {
        let h = fnv1a(seed, &name);
        let bucket = (h % dim as u64) as usize;
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        v[bucket] += sign * value;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(ComponentDescriptor {
        smiles: smiles.to_string(),
        vector: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::corpus::SMALL_MOLECULES;
    use std::collections::HashMap;

    #[test]
    fn deterministic() {
        assert_eq!(featurize("CCO", 384).unwrap(), featurize("CCO", 384).unwrap());
    }

    #[test]
    fn chain_length_changes_the_vector() {
        let a = featurize("CCO", 384).unwrap();
        let b = featurize("CCCO", 384).unwrap();
        assert_ne!(a.vector, b.vector);
        let a = featurize("CC", 16).unwrap();
        let b = featurize("CCC", 16).unwrap();
        assert_ne!(a.vector, b.vector);
    }

    #[test]
    fn unit_norm() {
        let v = featurize("CCO", 384).unwrap().vector;
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_floor_and_parse_errors() {
        assert!(matches!(featurize("CCO", 8), Err(Error::Invalid(_))));
        assert!(matches!(featurize("C(C", 64), Err(Error::Smiles { .. })));
    }

    #[test]
    fn injective_on_builtin_corpus() {
        assert!(SMALL_MOLECULES.len() >= 100);
        for dim in [64, 128, 384] {
            let mut seen = HashMap::new();
            let mut collisions = Vec::new();
            for s in SMALL_MOLECULES {
                let v = featurize(s, dim).unwrap().vector;
                let key: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
                if let Some(other) = seen.insert(key, *s) {
                    collisions.push(format!("{other} ~ {s}"));
                }
            }
            assert!(collisions.is_empty(), "collisions at dim {dim}: {collisions:?}");
        }
    }
}
