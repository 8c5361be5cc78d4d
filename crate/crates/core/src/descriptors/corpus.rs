/// Small solvents and common organics, used for synthetic datasets and
/// featurizer tests. Order is stable; `synth` takes a prefix of this list.
pub const SMALL_MOLECULES: &[&str] = &[
    "O",
    "CO",
    "CCO",
    "CCCO",
    "CC(C)O",
    "CCCCO",
    "CC(C)CO",
    "CCC(C)O",
    "CC(C)(C)O",
    "CCCCCO",
    "CC(=O)C",
    "CCC(=O)C",
    "CC(=O)O",
    "CCC(=O)O",
    "CC(=O)OC",
    "CC(=O)OCC",
    "C1CCCCC1",
    "c1ccccc1",
    "Cc1ccccc1",
    "CCc1ccccc1",
    "C",
    "CC",
    "CCC",
    "CCCC",
    "CC(C)C",
    "CCCCC",
    "CC(C)CC",
    "CC(C)(C)C",
    "CCCCCC",
    "CCCCCCC",
    "CCCCCCCC",
    "CCCCCCCCC",
    "CCCCCCCCCC",
    "C=C",
    "C=CC",
    "C#C",
    "CC#N",
    "CCC#N",
    "ClC(Cl)Cl",
    "ClC(Cl)(Cl)Cl",
    "ClCCl",
    "CCl",
    "CCCl",
    "CCBr",
    "CI",
    "FC(F)(F)F",
    "Clc1ccccc1",
    "Brc1ccccc1",
    "Fc1ccccc1",
    "Oc1ccccc1",
    "Nc1ccccc1",
    "c1ccncc1",
    "Cc1ccncc1",
    "c1ccoc1",
    "c1ccsc1",
    "c1cc[nH]c1",
    "C1CCOC1",
    "C1COCCO1",
    "CCOCC",
    "COC",
    "COC(C)(C)C",
    "CCN",
    "CCNCC",
    "CCN(CC)CC",
    "CN(C)C=O",
    "CC(=O)N(C)C",
    "CS(C)=O",
    "NC=O",
    "C1CCNCC1",
    "C1CCNC1",
    "OCCO",
    "CC(O)CO",
    "OCC(O)CO",
    "COCCO",
    "CCOCCO",
    "O=C1CCCCC1",
    "O=C",
    "CC=O",
    "CCC=O",
    "O=Cc1ccccc1",
    "CC(=O)c1ccccc1",
    "COc1ccccc1",
    "Cc1ccccc1C",
    "Cc1cccc(C)c1",
    "Cc1ccc(C)cc1",
    "c1ccc2ccccc2c1",
    "C1CCC1",
    "C1CC1",
    "C1CCCC1",
    "CC1CCCCC1",
    "CCCCCCCCCCCC",
    "OC(=O)C=C",
    "COC(=O)C=C",
    "COC(=O)C(C)=C",
    "C=CC=C",
    "CC(C)=C",
    "C=Cc1ccccc1",
    "N#Cc1ccccc1",
    "O=[N+]([O-])c1ccccc1",
    "CCCCC(=O)O",
    "OC(=O)c1ccccc1",
    "CCOC(=O)OCC",
    "O=C1OCCO1",
    "CC1COC(=O)O1",
    "CS(=O)(=O)C",
    "O=S1(=O)CCCC1",
    "CSC",
    "CCSCC",
    "S=C=S",
    "O=C=O",
    "N",
    "NCCO",
    "OCCN(CCO)CCO",
    "CNC",
    "CN",
    "CCCCN",
    "NCCN",
    "C[N+](C)(C)C",
    "[Na+].[Cl-]",
    "OO",
    "ClC=C(Cl)Cl",
    "ClCCCl",
    "FC(F)Cl",
    "CC(Cl)(Cl)Cl",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::tokenize_smiles;
    use std::collections::HashSet;

    #[test]
    fn all_entries_parse_and_are_distinct() {
        let mut seen = HashSet::new();
        for s in SMALL_MOLECULES {
            tokenize_smiles(s).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(seen.insert(*s), "duplicate {s}");
        }
    }
}
