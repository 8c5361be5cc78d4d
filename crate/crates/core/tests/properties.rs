//! Property tests over the public API with independent oracles.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use gibbsnet::autodiff::{Dual, Eager, Graph, Tape};
use gibbsnet::data::{split_system_ids, system_id, GammaRecord, SplitSpec, StandardizationStats};
use gibbsnet::descriptors::{ComponentDescriptor, DescriptorTable};
use gibbsnet::eval::system_mae;
use gibbsnet::model::{network, ArchitectureConfig, Composition, GammaPrediction, GeModel, MixtureQuery, ModelParameters, Variant};
use gibbsnet::thermo::{bubble_point_isothermal, gamma_from_vle, Pressure, PressureUnit};
use proptest::prelude::*;

const DIM: usize = 4;

fn model(variant: Variant, seed: u64) -> GeModel {
    let mut stats = StandardizationStats::identity(DIM);
    stats.t_mean = 320.0;
    stats.t_std = 30.0;
    GeModel::random(ArchitectureConfig::new(DIM, 3, variant), stats, seed).unwrap()
}

fn descriptor() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, DIM)
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn swapping_components_swaps_predictions(
        v in variant(),
        seed in 0u64..50,
        e1 in descriptor(),
        e2 in descriptor(),
        t in 250.0..420.0f64,
        x in 0.0..=1.0f64,
    ) {
        let m = model(v, seed);
        let q = MixtureQuery::new(&e1, &e2, t, x).unwrap();
        let a = m.predict(&q).unwrap();
        let b = m.predict(&q.swapped()).unwrap();
        prop_assert_eq!(a.ln_gamma1, b.ln_gamma2);
        prop_assert_eq!(a.ln_gamma2, b.ln_gamma1);
        prop_assert_eq!(a.ge_over_rt, b.ge_over_rt);
    }

    #[test]
    fn constrained_model_limits_are_exact(
        seed in 0u64..50,
        e1 in descriptor(),
        e2 in descriptor(),
        t in 250.0..420.0f64,
        x in 0.0..=1.0f64,
    ) {
        let m = model(Variant::Hanna, seed);
        let pure1 = m.predict(&MixtureQuery::new(&e1, &e2, t, 1.0).unwrap()).unwrap();
        let pure2 = m.predict(&MixtureQuery::new(&e1, &e2, t, 0.0).unwrap()).unwrap();
        prop_assert_eq!(pure1.ln_gamma1, 0.0);
        prop_assert_eq!(pure2.ln_gamma2, 0.0);
        let same = m.predict(&MixtureQuery::new(&e1, &e1, t, x).unwrap()).unwrap();
        prop_assert_eq!((same.ln_gamma1, same.ln_gamma2, same.ge_over_rt), (0.0, 0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dual_derivatives_match_finite_differences(x in 0.05..0.95f64, a in -3.0..3.0f64, b in 0.5..3.0f64) {
        // f(x) = silu(a x) * logistic(x - a) / (b + x) + sqrt(b + x²)
        let f = |x: Dual| {
            let lin = Dual::constant(a) * x;
            let den = Dual::constant(b) + x;
            let root = (Dual::constant(b) + x * x).sqrt().unwrap();
            (lin.silu() * (x - Dual::constant(a)).logistic()).checked_div(den).unwrap() + root
        };
        let h = 1e-6;
        let fd = (f(Dual::constant(x + h)).value - f(Dual::constant(x - h)).value) / (2.0 * h);
        let ad = f(Dual::seed(x)).dx1;
        prop_assert!((ad - fd).abs() <= 1e-7 * ad.abs().max(1.0), "ad {} fd {}", ad, fd);
    }

    #[test]
    fn graph_derivatives_match_finite_differences(
        u in prop::collection::vec(-2.0..2.0f64, 5),
        w in prop::collection::vec(-2.0..2.0f64, 5),
        x in 0.05..0.95f64,
    ) {
        // cosine distance of (u + x w) and w, through the graph API
        let f = |g: &mut Eager, x: Dual| {
            let a: Vec<Dual> = u.iter().zip(&w).map(|(&ui, &wi)| Dual::constant(ui) + x * Dual::constant(wi)).collect();
            let b: Vec<Dual> = w.iter().map(|&wi| Dual::constant(wi)).collect();
            network::cosine_distance(g, &a, &b)
        };
        let Ok(ad) = f(&mut Eager, Dual::seed(x)) else { return Ok(()) };
        let h = 1e-6;
        let up = f(&mut Eager, Dual::constant(x + h)).unwrap().value;
        let dn = f(&mut Eager, Dual::constant(x - h)).unwrap().value;
        let fd = (up - dn) / (2.0 * h);
        prop_assert!((ad.dx1 - fd).abs() <= 1e-6 * ad.dx1.abs().max(1.0), "ad {} fd {}", ad.dx1, fd);
    }
}

/// `Σ ln γ1² + ln γ2²` at three compositions, evaluated without a tape.
fn eager_loss(m: &GeModel, e1: &[f64], e2: &[f64], t: f64) -> f64 {
    [0.2, 0.5, 0.7]
        .iter()
        .map(|&x| {
            let p = m.predict(&MixtureQuery::new(e1, e2, t, x).unwrap()).unwrap();
            p.ln_gamma1 * p.ln_gamma1 + p.ln_gamma2 * p.ln_gamma2
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn parameter_gradients_match_finite_differences(
        v in variant(),
        seed in 0u64..1000,
        e1 in descriptor(),
        e2 in descriptor(),
        t in 280.0..380.0f64,
    ) {
        let m = model(v, seed);
        let mut tape = Tape::new();
        let bound = network::bind(&mut tape, &m.params.values);
        let z1 = m.stats.apply_descriptor(&e1).unwrap();
        let z2 = m.stats.apply_descriptor(&e2).unwrap();
        let emb1 = network::embed(&mut tape, &bound, &m.layout, &z1).unwrap();
        let emb2 = network::embed(&mut tape, &bound, &m.layout, &z2).unwrap();
        let mut total = tape.constant(Dual::ZERO);
        for x in [0.2, 0.5, 0.7] {
            let out = network::mixture(&mut tape, &bound, &m.layout, v, &emb1, &emb2, m.stats.apply_temperature(t), Composition::new(x)).unwrap();
            let a = tape.mul(out.ln_gamma1, out.ln_gamma1);
            let b = tape.mul(out.ln_gamma2, out.ln_gamma2);
            let s = tape.add(a, b);
            total = tape.add(total, s);
        }
        prop_assert!((tape.get(total).value - eager_loss(&m, &e1, &e2, t)).abs() < 1e-12);
        let grads = tape.backward(total).unwrap();

        let h = 1e-5;
        let n = m.params.values.len();
        for id in (0..n).step_by((n / 12).max(1)) {
            let shifted = |delta: f64| {
                let mut values = m.params.values.clone();
                values[id] += delta;
                let params = ModelParameters { values };
                let mm = GeModel::new(m.config.clone(), params, m.stats.clone()).unwrap();
                eager_loss(&mm, &e1, &e2, t)
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let ad = grads.get(id);
            prop_assert!(
                (ad - fd).abs() <= 1e-4 * ad.abs().max(fd.abs()).max(1e-6),
                "param {}: ad {} fd {}", id, ad, fd
            );
        }
    }
}

fn system_ids() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set("[A-Z]{1,3}\\|[a-z]{1,3}", 3..200).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn split_is_a_partition_independent_of_order(ids in system_ids(), seed in any::<u64>(), rot in 0usize..200) {
        let spec = SplitSpec { seed, ..SplitSpec::default() };
        let split = split_system_ids(ids.iter().map(String::as_str), &spec).unwrap();
        let n = ids.len();
        let (nt, nv, ns) = spec.counts(n);
        prop_assert_eq!((split.train.len(), split.val.len(), split.test.len()), (nt, nv, ns));
        prop_assert_eq!(nt, (n * 8) / 10);
        prop_assert_eq!(nv, n / 10);

        let all: BTreeSet<&String> = split.train.iter().chain(&split.val).chain(&split.test).collect();
        prop_assert_eq!(all.len(), n);
        prop_assert_eq!(all, ids.iter().collect::<BTreeSet<_>>());

        let mut shuffled = ids.clone();
        shuffled.rotate_left(rot % n);
        shuffled.reverse();
        shuffled.extend(ids.iter().take(5).cloned());
        let again = split_system_ids(shuffled.iter().map(String::as_str), &spec).unwrap();
        prop_assert_eq!(split, again);
    }

    #[test]
    fn system_mae_ignores_order_and_component_permutation(
        rows in prop::collection::vec((0usize..4, 0.0..=1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..40),
        rot in 0usize..40,
    ) {
        const NAMES: [(&str, &str); 4] = [("A", "B"), ("A", "C"), ("B", "C"), ("C", "D")];
        let mut records = Vec::new();
        let mut preds = Vec::new();
        for &(k, x, t1, t2, p1, p2) in &rows {
            let (a, b) = NAMES[k];
            records.push(GammaRecord::new(a, b, 300.0, x, Some(t1), Some(t2), "t"));
            preds.push(GammaPrediction { ln_gamma1: p1, ln_gamma2: p2, ge_over_rt: x * p1 + (1.0 - x) * p2 });
        }
        let base = system_mae(&records, &preds).unwrap();

        // independent oracle: mean absolute error per system
        let mut acc: HashMap<String, (f64, usize)> = HashMap::new();
        for &(k, _, t1, t2, p1, p2) in &rows {
            let e = acc.entry(system_id(NAMES[k].0, NAMES[k].1)).or_default();
            e.0 += (p1 - t1).abs() + (p2 - t2).abs();
            e.1 += 2;
        }
        prop_assert_eq!(base.len(), acc.len());
        for (id, (sum, n)) in &acc {
            prop_assert!((base[id] - sum / *n as f64).abs() < 1e-12);
        }

        let r = rot % records.len();
        let mut rec2: Vec<GammaRecord> = records.clone();
        let mut pred2 = preds.clone();
        rec2.rotate_left(r);
        pred2.rotate_left(r);
        for (rec, p) in rec2.iter_mut().zip(pred2.iter_mut()).step_by(2) {
            *rec = GammaRecord::new(&rec.smiles_2, &rec.smiles_1, rec.temperature, 1.0 - rec.x1, rec.ln_gamma2, rec.ln_gamma1, "t");
            *p = GammaPrediction { ln_gamma1: p.ln_gamma2, ln_gamma2: p.ln_gamma1, ge_over_rt: p.ge_over_rt };
        }
        let moved = system_mae(&rec2, &pred2).unwrap();
        prop_assert_eq!(base.len(), moved.len());
        for (id, v) in &base {
            prop_assert!((v - moved[id]).abs() < 1e-12);
        }
    }

    #[test]
    fn descriptor_csv_round_trips(
        entries in prop::collection::btree_map("[A-Za-z0-9=#()\\[\\]@+]{1,12}", prop::collection::vec(-1e6..1e6f64, 5), 1..20),
        tag in "[a-z][a-z0-9_-]{0,15}",
        seed in any::<u64>(),
    ) {
        let mut table = DescriptorTable::new(5, tag.clone(), Some(seed));
        for (s, v) in &entries {
            table.insert(ComponentDescriptor { smiles: s.clone(), vector: v.clone() }).unwrap();
        }
        let text = table.to_csv();
        let expected_header = format!("smiles,dim=5,source={tag},seed={seed}");
        prop_assert_eq!(text.lines().next().unwrap(), expected_header.as_str());
        let (back, report) = DescriptorTable::parse(&text, Path::new("mem.csv")).unwrap();
        prop_assert!(report.warnings.is_empty());
        prop_assert_eq!(back, table);
    }

    #[test]
    fn bubble_point_closes(
        x in 0.0..=1.0f64,
        l1 in -2.0..2.0f64,
        l2 in -2.0..2.0f64,
        p1 in 0.1..500.0f64,
        p2 in 0.1..500.0f64,
    ) {
        let (s1, s2) = (Pressure::new(p1, PressureUnit::KPa), Pressure::new(p2, PressureUnit::KPa));
        let (g1, g2) = (l1.exp(), l2.exp());
        let bp = bubble_point_isothermal(x, g1, g2, s1, s2).unwrap();
        prop_assert!((bp.y1 + bp.y2 - 1.0).abs() < 1e-14);
        prop_assert!((bp.p.value - (x * g1 * p1 + (1.0 - x) * g2 * p2)).abs() <= 1e-13 * bp.p.value);
        if x > 0.0 {
            let back = gamma_from_vle(bp.p, bp.y1, x, s1).unwrap();
            prop_assert!((back - g1).abs() <= 1e-12 * g1);
        }
        if x < 1.0 {
            let back = gamma_from_vle(bp.p, bp.y2, 1.0 - x, s2).unwrap();
            prop_assert!((back - g2).abs() <= 1e-12 * g2);
        }
    }
}

/// Exporter files written by an external tool load with the declared
/// metadata, in file order, and reject malformed rows with their line.
#[test]
fn exporter_contract() {
    let text = "smiles,dim=3,source=chemberta-77m-mtr,seed=42\nCCO,0.1,-0.2,3e-1\nO,1,2,3\n";
    let (t, report) = DescriptorTable::parse(text, Path::new("export.csv")).unwrap();
    assert!(report.warnings.is_empty());
    assert_eq!((t.dim(), t.source.as_str(), t.seed), (3, "chemberta-77m-mtr", Some(42)));
    let keys: Vec<&str> = t.iter().map(|d| d.smiles.as_str()).collect();
    assert_eq!(keys, ["CCO", "O"]);
    assert_eq!(t.get("CCO").unwrap().vector, [0.1, -0.2, 0.3]);

    let short = "smiles,dim=3,source=x,seed=1\nCCO,0.1,0.2\n";
    let e = DescriptorTable::parse(short, Path::new("export.csv")).unwrap_err().to_string();
    assert!(e.starts_with("export.csv:2:"), "{e}");

    let bare = "smiles,dim=2\nO,1,2\n";
    let (_, report) = DescriptorTable::parse(bare, Path::new("export.csv")).unwrap();
    assert_eq!(report.warnings.len(), 2);
}
