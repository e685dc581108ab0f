use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gnn::ModelParams;

/// Sample-weighted average `Σ (n_i / n) ω_i`.
///
/// Inputs are summed in a canonical order (by weight, then by value bits) and
/// as offsets from the first model in that order, so the result does not
/// depend on client order and averaging identical models returns them exactly.
pub fn aggregate(models: &[(&ModelParams, usize)]) -> Result<ModelParams> {
    let Some(&(first, _)) = models.first() else {
        return Err(Error::Contract("aggregate over no models".into()));
    };
    for (m, _) in &models[1..] {
        first.ensure_compatible(m, "aggregate")?;
    }
    let total: usize = models.iter().map(|&(_, n)| n).sum();
    if total == 0 {
        return Err(Error::Contract("aggregate weights sum to zero".into()));
    }

    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| canonical_cmp(models[a], models[b]));
    let reference = models[order[0]].0;
    let mut out = reference.clone();
    let total = total as f64;
    for (k, r) in out.values_mut().iter_mut().enumerate() {
        let base = reference.values()[k];
        let mut acc = 0.0;
        for &i in &order[1..] {
            let (m, n) = models[i];
            acc += n as f64 * (m.values()[k] - base);
        }
        *r = base + acc / total;
    }
    Ok(out)
}

fn canonical_cmp(a: (&ModelParams, usize), b: (&ModelParams, usize)) -> Ordering {
    a.1.cmp(&b.1).then_with(|| {
        a.0.values()
            .iter()
            .zip(b.0.values())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}
