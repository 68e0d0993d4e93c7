use crate::diffusion::ResiduePair;
use crate::error::{shape, Result};

fn check(pred: &ResiduePair, truth: &ResiduePair) -> Result<()> {
    let lens = [pred.x_res.len(), pred.eps.len(), truth.x_res.len(), truth.eps.len()];
    if lens.iter().any(|&l| l != lens[0]) {
        return Err(shape(format!("loss operands have lengths {lens:?}")));
    }
    Ok(())
}

/// `||x_res_hat - x_res||^2 + ||eps_hat - eps||^2`.
pub fn loss(pred: &ResiduePair, truth: &ResiduePair) -> Result<f64> {
    check(pred, truth)?;
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
    Ok(sq(&pred.x_res, &truth.x_res) + sq(&pred.eps, &truth.eps))
}

/// Loss together with its gradient with respect to the prediction.
pub fn loss_and_grad(pred: &ResiduePair, truth: &ResiduePair) -> Result<(f64, ResiduePair)> {
    let value = loss(pred, truth)?;
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| 2.0 * (p - q)).collect();
    Ok((value, ResiduePair { x_res: d(&pred.x_res, &truth.x_res), eps: d(&pred.eps, &truth.eps) }))
}
