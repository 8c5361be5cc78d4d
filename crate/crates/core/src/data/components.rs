use std::collections::HashMap;

use super::{GammaRecord, StandardizationStats};
use crate::descriptors::DescriptorTable;
use crate::error::{Error, Result};

/// Standardized descriptors of every component referenced by a set of
/// records, computed once up front.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StandardizedComponents {
    map: HashMap<String, Vec<f64>>,
}

impl StandardizedComponents {
    pub fn new<'a>(
        stats: &StandardizationStats,
        table: &DescriptorTable,
        records: impl IntoIterator<Item = &'a GammaRecord>,
    ) -> Result<Self> {
        let mut map = HashMap::new();
        let mut missing = Vec::new();
        for r in records {
            for s in [&r.smiles_1, &r.smiles_2] {
                if map.contains_key(s) {
                    continue;
                }
                match table.get(s) {
                    Some(d) => {
                        map.insert(s.clone(), stats.apply_descriptor(&d.vector)?);
                    }
                    None => missing.push(s.clone()),
                }
            }
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::MissingDescriptors(missing));
        }
        Ok(StandardizedComponents { map })
    }

    pub fn get(&self, smiles: &str) -> Result<&[f64]> {
        self.map
            .get(smiles)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingDescriptors(vec![smiles.to_string()]))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn smiles(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::ComponentDescriptor;

    #[test]
    fn standardizes_once_per_component() {
        let mut t = DescriptorTable::new(2, "test", None);
        for (s, v) in [("A", [1.0, 2.0]), ("B", [3.0, 6.0])] {
            t.insert(ComponentDescriptor {
                smiles: s.into(),
                vector: v.to_vec(),
            })
            .unwrap();
        }
        let mut stats = StandardizationStats::identity(2);
        stats.descriptor_mean = vec![1.0, 2.0];
        stats.descriptor_std = vec![2.0, 4.0];
        let recs = vec![
            GammaRecord::new("A", "B", 300.0, 0.5, Some(0.1), None, "t"),
            GammaRecord::new("B", "A", 300.0, 0.2, Some(0.1), None, "t"),
        ];
        let c = StandardizedComponents::new(&stats, &t, &recs).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("B").unwrap(), &[1.0, 1.0]);
        assert!(c.get("C").is_err());
        let bad = vec![GammaRecord::new("A", "Z", 300.0, 0.5, Some(0.1), None, "t")];
        assert!(matches!(
            StandardizedComponents::new(&stats, &t, &bad),
            Err(Error::MissingDescriptors(m)) if m == vec!["Z".to_string()]
        ));
    }
}
