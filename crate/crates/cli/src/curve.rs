//! Plot-ready grids of extreme-eigenvalue distributions, optionally with
//! Monte-Carlo histograms.

use rmt_gaps::montecarlo::histogram_on;
use rmt_gaps::{simulate, Execution, Extreme, Model, Quantity, SimulationConfig};

use crate::error::{CliError, Result};
use crate::output::{Abscissa, ResultRow};

/// `points` equally spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(CliError::validation("points ≥ 1 violated"));
    }
    if !(from.is_finite() && to.is_finite()) || from > to {
        return Err(CliError::validation(format!("grid needs finite from ≤ to (got {from}, {to})")));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points).map(|i| if i + 1 == points { to } else { from + step * i as f64 }).collect())
}

/// Analytic curve of `quantity` on [from, to].
///
/// Without MC the grid is `points` equally spaced abscissae. With MC,
/// distribution functions are compared point by point with the empirical
/// fraction; densities use `points` histogram bins, the abscissa is the bin
/// centre and the analytic column holds the exact bin average
/// (a difference of distribution functions over the bin width), which is
/// what the histogram estimates.
pub fn curve(
    model: &Model,
    quantity: Quantity,
    from: f64,
    to: f64,
    points: usize,
    mc: Option<&SimulationConfig>,
    exec: Execution,
) -> Result<Vec<ResultRow>> {
    let Some(cfg) = mc else {
        let xs = linspace(from, to, points)?;
        let ys = model.evaluate_grid(quantity, &xs, exec)?;
        return Ok(xs.iter().zip(ys).map(|(&x, y)| ResultRow::analytic(Abscissa::X(x), y)).collect());
    };
    let run = simulate(model, cfg)?;
    let (lo, hi) = model.domain();
    match quantity {
        Quantity::SfMin | Quantity::CdfMax => {
            let xs = linspace(from, to, points)?;
            let ys = model.evaluate_grid(quantity, &xs, exec)?;
            xs.iter()
                .zip(ys)
                .map(|(&x, y)| {
                    let est = if quantity == Quantity::SfMin { run.gap(lo, x)? } else { run.gap(x, hi)? };
                    Ok(ResultRow::analytic(Abscissa::X(x), y).with_mc(est.value, est.std_error))
                })
                .collect()
        }
        Quantity::PdfMin | Quantity::PdfMax => {
            if points < 2 {
                return Err(CliError::validation("a histogram needs points ≥ 2"));
            }
            let which = if quantity == Quantity::PdfMin { Extreme::Min } else { Extreme::Max };
            let hist = histogram_on(&run.samples, which, from, to, points)?;
            let dist = if quantity == Quantity::PdfMin { Quantity::SfMin } else { Quantity::CdfMax };
            let edges = model.evaluate_grid(dist, &hist.edges, exec)?;
            let centers = hist.centers();
            Ok((0..points)
                .map(|i| {
                    let width = hist.edges[i + 1] - hist.edges[i];
                    let mass = (edges[i + 1] - edges[i]).abs();
                    ResultRow::analytic(Abscissa::X(centers[i]), mass / width).with_mc(hist.density[i], hist.std_error[i])
                })
                .collect())
        }
    }
}
