use std::collections::HashMap;

use crate::autodiff::{Dual, Graph, Tape, Var};
use crate::data::{GammaRecord, StandardizedComponents};
use crate::error::{Error, Result};
use crate::model::{network, Composition, GammaPrediction, GeModel};

/// `0.5 d²/β` for `|d| < β`, else `|d| - β/2`, with `d = pred - target`.
pub fn smooth_l1(pred: f64, target: f64, beta: f64) -> f64 {
    let d = pred - target;
    if d.abs() < beta {
        0.5 * d * d / beta
    } else {
        d.abs() - 0.5 * beta
    }
}

/// [`smooth_l1`] as graph nodes. The branch is chosen on the value channel.
pub fn smooth_l1_node<G: Graph>(g: &mut G, pred: G::Value, target: f64, beta: f64) -> G::Value {
    let t = g.constant(Dual::constant(target));
    let d = g.sub(pred, t);
    let dv = g.get(d).value;
    if dv.abs() < beta {
        let sq = g.mul(d, d);
        g.scale(sq, 0.5 / beta)
    } else {
        let a = if dv >= 0.0 { d } else { g.neg(d) };
        let half = g.constant(Dual::constant(0.5 * beta));
        g.sub(a, half)
    }
}

/// Sum of losses and number of present targets for one record.
pub fn record_terms(pred: &GammaPrediction, record: &GammaRecord, beta: f64) -> (f64, usize) {
    let mut sum = 0.0;
    let mut n = 0;
    for (p, t) in [(pred.ln_gamma1, record.ln_gamma1), (pred.ln_gamma2, record.ln_gamma2)] {
        if let Some(t) = t {
            sum += smooth_l1(p, t, beta);
            n += 1;
        }
    }
    (sum, n)
}

/// Mean SmoothL1 over every present target of `batch`, recorded on `tape`.
/// `bound` must come from [`network::bind`] on the same tape. Returns the
/// loss node and the number of terms averaged.
pub fn batch_loss(
    tape: &mut Tape,
    bound: &[Var],
    model: &GeModel,
    batch: &[&GammaRecord],
    components: &StandardizedComponents,
    beta: f64,
) -> Result<(Var, usize)> {
    if batch.is_empty() {
        return Err(Error::Invalid("empty batch".into()));
    }
    let n_terms: usize = batch.iter().map(|r| r.n_targets()).sum();
    if n_terms == 0 {
        return Err(Error::Invalid("batch has no ln gamma targets".into()));
    }
    let mut embedded: HashMap<&str, Vec<Var>> = HashMap::new();
    let mut terms = Vec::with_capacity(n_terms);
    for r in batch {
        for s in [r.smiles_1.as_str(), r.smiles_2.as_str()] {
            if !embedded.contains_key(s) {
                let e = network::embed(tape, bound, &model.layout, components.get(s)?)?;
                embedded.insert(s, e);
            }
        }
        let out = network::mixture(
            tape,
            bound,
            &model.layout,
            model.config.variant,
            &embedded[r.smiles_1.as_str()],
            &embedded[r.smiles_2.as_str()],
            model.stats.apply_temperature(r.temperature),
            Composition::new(r.x1),
        )?;
        if let Some(t) = r.ln_gamma1 {
            terms.push(smooth_l1_node(tape, out.ln_gamma1, t, beta));
        }
        if let Some(t) = r.ln_gamma2 {
            terms.push(smooth_l1_node(tape, out.ln_gamma2, t, beta));
        }
    }
    let mut total = terms[0];
    for &t in &terms[1..] {
        total = tape.add(total, t);
    }
    Ok((tape.scale(total, 1.0 / n_terms as f64), n_terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Eager;
    use crate::data::StandardizationStats;
    use crate::descriptors::{ComponentDescriptor, DescriptorTable};
    use crate::model::{ArchitectureConfig, Variant};
    use approx::assert_relative_eq;

    #[test]
    fn smooth_l1_values() {
        assert_eq!(smooth_l1(0.3, 0.3, 0.25), 0.0);
        assert_relative_eq!(smooth_l1(0.1, 0.0, 0.25), 0.02, epsilon = 1e-15);
        assert_relative_eq!(smooth_l1(0.0, 1.0, 0.25), 0.875, epsilon = 1e-15);
        // continuous at the threshold
        assert_relative_eq!(smooth_l1(0.25, 0.0, 0.25), 0.125, epsilon = 1e-15);
        for d in [-2.0, -0.2, 0.0, 0.05, 0.3, 1.7] {
            let node = smooth_l1_node(&mut Eager, Dual::constant(d), 0.0, 0.25);
            assert_eq!(node.value, smooth_l1(d, 0.0, 0.25));
        }
    }

    fn fixture() -> (GeModel, StandardizedComponents, Vec<GammaRecord>) {
        let mut table = DescriptorTable::new(3, "test", None);
        for (s, v) in [("A", [1.0, 0.0, 0.5]), ("B", [0.0, 1.0, -0.5]), ("C", [0.3, 0.3, 0.3])] {
            table
                .insert(ComponentDescriptor {
                    smiles: s.into(),
                    vector: v.to_vec(),
                })
                .unwrap();
        }
        let recs = vec![
            GammaRecord::new("A", "B", 300.0, 0.3, Some(0.4), Some(0.1), "t"),
            GammaRecord::new("A", "C", 310.0, 0.6, None, Some(-0.2), "t"),
            GammaRecord::new("B", "C", 320.0, 0.5, None, None, "t"),
        ];
        let stats = StandardizationStats::fit(&recs, &table).unwrap();
        let comps = StandardizedComponents::new(&stats, &table, &recs).unwrap();
        let model = GeModel::random(ArchitectureConfig::new(3, 4, Variant::Hanna), stats, 5).unwrap();
        (model, comps, recs)
    }

    fn loss_on_tape(model: &GeModel, comps: &StandardizedComponents, batch: &[&GammaRecord]) -> Result<(f64, usize)> {
        let mut tape = Tape::new();
        let bound = network::bind(&mut tape, &model.params.values);
        let (l, n) = batch_loss(&mut tape, &bound, model, batch, comps, 0.25)?;
        Ok((tape.get(l).value, n))
    }

    #[test]
    fn batch_loss_counts_present_targets() {
        let (model, comps, recs) = fixture();
        let ev = model.evaluator();
        let pred = |r: &GammaRecord| {
            ev.predict_embedded(
                &ev.embed_standardized(comps.get(&r.smiles_1).unwrap()).unwrap(),
                &ev.embed_standardized(comps.get(&r.smiles_2).unwrap()).unwrap(),
                r.temperature,
                Composition::new(r.x1),
            )
            .unwrap()
        };
        let (s0, n0) = record_terms(&pred(&recs[0]), &recs[0], 0.25);
        let (s1, n1) = record_terms(&pred(&recs[1]), &recs[1], 0.25);
        assert_eq!((n0, n1), (2, 1));

        let (single, n) = loss_on_tape(&model, &comps, &[&recs[1]]).unwrap();
        assert_eq!(n, 1);
        assert_relative_eq!(single, s1, epsilon = 1e-14);

        let (all, n) = loss_on_tape(&model, &comps, &[&recs[0], &recs[1], &recs[2]]).unwrap();
        assert_eq!(n, 3);
        assert_relative_eq!(all, (s0 + s1) / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn perfect_predictions_give_zero() {
        let (model, comps, recs) = fixture();
        let ev = model.evaluator();
        let r = &recs[0];
        let p = ev
            .predict_embedded(
                &ev.embed_standardized(comps.get("A").unwrap()).unwrap(),
                &ev.embed_standardized(comps.get("B").unwrap()).unwrap(),
                r.temperature,
                Composition::new(r.x1),
            )
            .unwrap();
        let exact = GammaRecord::new("A", "B", r.temperature, r.x1, Some(p.ln_gamma1), Some(p.ln_gamma2), "t");
        assert_eq!(loss_on_tape(&model, &comps, &[&exact]).unwrap().0, 0.0);
    }

    #[test]
    fn empty_or_targetless_batches_fail() {
        let (model, comps, recs) = fixture();
        assert!(loss_on_tape(&model, &comps, &[]).is_err());
        assert!(loss_on_tape(&model, &comps, &[&recs[2]]).is_err());
    }
}
