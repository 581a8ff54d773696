//! Published gap-probability tables, shipped as data.

use rmt_gaps::{EnsembleSpec, Family, GapQuery};
use serde::Deserialize;

use crate::config::parse_real;
use crate::error::{CliError, Result};

const TABLES_TOML: &str = include_str!("../data/tables.toml");

/// Identifiers accepted by `reproduce-table`.
pub const TABLE_IDS: [&str; 12] = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "bures-corr", "bures-uncorr"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableSet {
    table: Vec<Table>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub id: String,
    pub title: String,
    pub family: Family,
    pub correlated: bool,
    #[serde(default)]
    pub sigma_pool: Vec<String>,
    pub row: Vec<TableRow>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub n: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub r: String,
    pub s: String,
    /// Published degrees of freedom of the matrix construction.
    pub m: Option<u32>,
    pub n_a: Option<u32>,
    pub n_b: Option<u32>,
    pub e: f64,
    pub e_sim: f64,
    pub e_tilde: f64,
    pub e_tilde_sim: f64,
}

/// A table row compiled into a spec and a query.
#[derive(Debug, Clone)]
pub struct ResolvedRow {
    pub index: usize,
    pub spec: EnsembleSpec,
    pub query: GapQuery,
    /// How the parameter columns were reconciled, when they disagreed.
    pub notes: Vec<String>,
}

/// Every table, in file order.
pub fn tables() -> Result<Vec<Table>> {
    let set: TableSet =
        toml::from_str(TABLES_TOML).map_err(|e| CliError::Numerical(format!("embedded table data is malformed: {e}")))?;
    Ok(set.table)
}

pub fn table(id: &str) -> Result<Table> {
    let key = id.trim().to_ascii_lowercase();
    tables()?
        .into_iter()
        .find(|t| t.id == key)
        .ok_or_else(|| CliError::validation(format!("unknown table '{id}' (expected one of {})", TABLE_IDS.join(", "))))
}

const DOF_TOL: f64 = 1e-9;

fn reconcile(name: &str, printed: f64, implied: f64, source: &str, notes: &mut Vec<String>) -> f64 {
    if (printed - implied).abs() > DOF_TOL {
        notes.push(format!("printed {name} = {printed} contradicts {source}; using {name} = {implied}"));
    }
    implied
}

impl Table {
    pub fn resolve(&self, index: usize) -> Result<ResolvedRow> {
        let row = self.row.get(index).ok_or_else(|| CliError::validation(format!("table {} has no row {}", self.id, index + 1)))?;
        let n = row.n;
        let nf = n as f64;
        let mut notes = Vec::new();
        let mut alpha = row.alpha.unwrap_or(0.0);
        let mut beta = row.beta.unwrap_or(0.0);
        let mut kappa = row.kappa.unwrap_or(0.0);
        match self.family {
            Family::LaguerreWishart => {
                if let Some(m) = row.m {
                    alpha = reconcile("α", alpha, m as f64 - nf, "m − n", &mut notes);
                }
            }
            Family::BuresHall => {
                if let Some(m) = row.m {
                    alpha = reconcile("α", alpha, m as f64 - nf - 0.5, "m − n − 1/2", &mut notes);
                }
            }
            Family::JacobiManova => {
                if let Some(a) = row.n_a {
                    alpha = reconcile("α", alpha, a as f64 - nf, "n_A − n", &mut notes);
                }
                if let Some(b) = row.n_b {
                    beta = reconcile("β", beta, b as f64 - nf, "n_B − n", &mut notes);
                }
            }
            Family::CauchyLorentzII => {
                if let Some(a) = row.n_a {
                    alpha = reconcile("α", alpha, a as f64 - nf, "n_A − n", &mut notes);
                    if let Some(b) = row.n_b {
                        kappa = reconcile("κ", kappa, (a + b) as f64, "n_A + n_B", &mut notes);
                    }
                }
            }
            Family::GaussWigner | Family::CauchyLorentzI => {}
        }
        let base = if self.correlated {
            if self.sigma_pool.len() < n {
                return Err(CliError::validation(format!("table {}: σ pool shorter than n = {n}", self.id)));
            }
            let sigma = self.sigma_pool[..n].iter().map(|t| parse_real(t)).collect::<Result<Vec<f64>>>()?;
            EnsembleSpec::correlated(self.family, sigma)
        } else {
            EnsembleSpec::uncorrelated(self.family, n)
        };
        let spec = base.with_alpha(alpha).with_beta(beta).with_kappa(kappa);
        spec.validated()?;
        let query = GapQuery::new(parse_real(&row.r)?, parse_real(&row.s)?);
        Ok(ResolvedRow { index, spec, query, notes })
    }

    pub fn resolve_all(&self) -> Result<Vec<ResolvedRow>> {
        (0..self.row.len()).map(|i| self.resolve(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tables_load_and_resolve() {
        let ts = tables().unwrap();
        assert_eq!(ts.len(), TABLE_IDS.len());
        for (t, id) in ts.iter().zip(TABLE_IDS) {
            assert_eq!(t.id, id);
            assert!(t.row.len() >= 5);
            t.resolve_all().unwrap();
        }
    }

    #[test]
    fn dof_columns_win_over_printed_parameters() {
        let t = table("10").unwrap();
        let r = t.resolve(4).unwrap();
        assert_eq!((r.spec.alpha, r.spec.beta), (9.0, 2.0));
        assert_eq!(r.notes.len(), 2);
        for i in 0..4 {
            assert!(t.resolve(i).unwrap().notes.is_empty());
        }
    }
}
