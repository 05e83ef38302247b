//! Figure catalog: which model, quantity and horizons each panel plots, plus
//! the CSV/SVG emission. Period `n` is plotted at `t = n/N`.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use auction_core::path::{build_path, limit_curves};
use auction_core::recursion::solve;
use auction_core::{EquilibriumPath, MarketParams, ModelKind};

use crate::config::RunConfig;
use crate::output::{fmt_f64, fmt_opt, write_csv};
use crate::svg::{Chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Sigma,
    Lambda,
    Beta,
}

impl Quantity {
    fn label(self) -> &'static str {
        match self {
            Quantity::Sigma => "residual variance Σ",
            Quantity::Lambda => "price impact λ",
            Quantity::Beta => "trading intensity β",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PanelKind {
    /// One series per horizon in the configured period list.
    Horizons,
    /// One horizon with its continuous-trading approximation overlaid.
    Limit(usize),
    /// Risk-neutral insider against the Kyle baseline at one horizon.
    Compare(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub id: String,
    pub model: ModelKind,
    pub quantity: Quantity,
    pub kind: PanelKind,
}

/// All panels in catalog order.
pub fn catalog() -> Vec<Panel> {
    use ModelKind::*;
    use Quantity::*;
    let mut out = Vec::new();
    let groups = [
        (1, RiskAverse, Sigma, 1000),
        (2, RiskAverse, Lambda, 1000),
        (3, RiskAverse, Beta, 50),
        (5, RiskNeutral, Sigma, 100),
        (6, RiskNeutral, Lambda, 100),
        (7, RiskNeutral, Beta, 100),
        (8, RiskSeeking, Sigma, 20),
        (9, RiskSeeking, Lambda, 20),
        (10, RiskSeeking, Beta, 20),
    ];
    for (fig, model, quantity, limit_n) in groups {
        if fig == 5 {
            for (suffix, q) in [("a", Sigma), ("b", Lambda), ("c", Beta)] {
                out.push(Panel {
                    id: format!("4{suffix}"),
                    model: RiskNeutral,
                    quantity: q,
                    kind: PanelKind::Compare(20),
                });
            }
        }
        out.push(Panel {
            id: format!("{fig}a"),
            model,
            quantity,
            kind: PanelKind::Horizons,
        });
        out.push(Panel {
            id: format!("{fig}b"),
            model,
            quantity,
            kind: PanelKind::Limit(limit_n),
        });
    }
    out
}

/// Resolves a request like `["1", "4", "8b"]`; `None` selects everything.
pub fn select(request: Option<&[String]>) -> Result<Vec<Panel>> {
    let all = catalog();
    let Some(request) = request else {
        return Ok(all);
    };
    let mut out: Vec<Panel> = Vec::new();
    for item in request {
        let item = item.trim().to_lowercase();
        let matched: Vec<&Panel> = all
            .iter()
            .filter(|p| p.id == item || p.id.trim_end_matches(char::is_alphabetic) == item)
            .collect();
        if matched.is_empty() {
            bail!("unknown figure `{item}` (expected 1-10, optionally with a panel letter)");
        }
        for p in matched {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
    }
    Ok(out)
}

/// Values of one quantity at `n` (`None` where it is undefined).
fn value_at(eq: &EquilibriumPath, q: Quantity, n: usize) -> Option<f64> {
    match q {
        Quantity::Sigma => Some(eq.sigma(n)),
        Quantity::Lambda => (n >= 1).then(|| eq.lambda(n)),
        Quantity::Beta => (n >= 1).then(|| eq.beta(n)),
    }
}

/// A point on the time axis, `num/den`, kept exact so horizons align.
#[derive(Debug, Clone, Copy)]
struct Time {
    num: usize,
    den: usize,
}

impl Time {
    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn cmp(self, other: Time) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

struct Column {
    name: String,
    values: Vec<(Time, f64)>,
    dashed: bool,
}

pub struct Figure {
    pub id: String,
    title: String,
    y_label: String,
    columns: Vec<Column>,
}

fn equilibrium(
    model: ModelKind,
    cfg: &RunConfig,
    n: usize,
) -> Result<(MarketParams, EquilibriumPath)> {
    let params = cfg.params(n)?;
    let coeffs = solve(model, &params).with_context(|| format!("solving {model} at N={n}"))?;
    Ok((params, build_path(&coeffs, &params)?))
}

fn discrete_column(name: String, eq: &EquilibriumPath, q: Quantity) -> Column {
    let n_periods = eq.n_periods();
    let values = (0..=n_periods)
        .filter_map(|n| {
            value_at(eq, q, n).map(|v| {
                (
                    Time {
                        num: n,
                        den: n_periods,
                    },
                    v,
                )
            })
        })
        .collect();
    Column {
        name,
        values,
        dashed: false,
    }
}

/// Continuous-trading approximation at the interior periods `1..N`.
///
/// The risk-averse limits of Σ, λ, β degenerate, so its overlay rebuilds the
/// path from the scaled-coefficient limit `c_n ≈ Δt^{1/4} c̄(t_n)`; the other
/// models use their closed-form curves directly.
fn limit_column(model: ModelKind, params: &MarketParams, q: Quantity) -> Result<Column> {
    let n_periods = params.n_periods;
    let dt = params.dt();
    let times: Vec<Time> = (1..n_periods)
        .map(|n| Time {
            num: n,
            den: n_periods,
        })
        .collect();
    let grid: Vec<f64> = times.iter().map(|t| t.value()).collect();
    let lim = limit_curves(model, params, &grid)?;
    let values = match model {
        ModelKind::RiskAverse => {
            let scale = dt.powf(lim.scaling_exponent());
            let mut sigma = params.sigma0_sq;
            let mut out = Vec::with_capacity(times.len());
            for (i, &t) in times.iter().enumerate() {
                let c = scale * lim.c_scaled[i];
                let k = 1.0 / (1.0 + c * c);
                let v = match q {
                    Quantity::Sigma => sigma * k,
                    Quantity::Lambda => c * sigma.sqrt() * k / params.noise_scale(),
                    Quantity::Beta => c * params.noise_scale() / sigma.sqrt(),
                };
                sigma *= k;
                out.push((t, v));
            }
            out
        }
        _ => times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let v = match q {
                    Quantity::Sigma => lim.sigma_lim[i],
                    Quantity::Lambda => lim.lambda_lim[i],
                    Quantity::Beta => lim.beta_rate_lim[i] * dt,
                };
                (t, v)
            })
            .collect(),
    };
    Ok(Column {
        name: "limit".into(),
        values,
        dashed: true,
    })
}

pub fn build(panel: &Panel, cfg: &RunConfig) -> Result<Figure> {
    let (columns, subtitle) = match panel.kind {
        PanelKind::Horizons => {
            let mut cols = Vec::new();
            for &n in &cfg.periods {
                let (_, eq) = equilibrium(panel.model, cfg, n)?;
                cols.push(discrete_column(format!("N={n}"), &eq, panel.quantity));
            }
            (cols, String::new())
        }
        PanelKind::Limit(n) => {
            let (params, eq) = equilibrium(panel.model, cfg, n)?;
            let cols = vec![
                discrete_column(format!("N={n}"), &eq, panel.quantity),
                limit_column(panel.model, &params, panel.quantity)?,
            ];
            (cols, format!(", N={n} vs limit"))
        }
        PanelKind::Compare(n) => {
            let mut cols = Vec::new();
            for model in [ModelKind::RiskNeutral, ModelKind::KyleBaseline] {
                let (_, eq) = equilibrium(model, cfg, n)?;
                cols.push(discrete_column(
                    model.as_str().to_string(),
                    &eq,
                    panel.quantity,
                ));
            }
            (cols, format!(", risk-neutral vs Kyle, N={n}"))
        }
    };
    let who = match panel.kind {
        PanelKind::Compare(_) => "Kyle comparison".to_string(),
        _ => format!("{} insider", panel.model),
    };
    Ok(Figure {
        id: panel.id.clone(),
        title: format!(
            "Figure {}: {} — {}{}",
            panel.id,
            panel.quantity.label(),
            who,
            subtitle
        ),
        y_label: panel.quantity.label().to_string(),
        columns,
    })
}

impl Figure {
    /// Wide table over the union of time points; empty cells where a series
    /// has no value.
    fn rows(&self) -> Vec<Vec<String>> {
        let mut times: Vec<Time> = self
            .columns
            .iter()
            .flat_map(|c| c.values.iter().map(|&(t, _)| t))
            .collect();
        times.sort_by(|a, b| a.cmp(*b));
        times.dedup_by(|a, b| a.cmp(*b) == Ordering::Equal);
        times
            .iter()
            .map(|&t| {
                let mut row = vec![fmt_f64(t.value())];
                for col in &self.columns {
                    let v = col
                        .values
                        .binary_search_by(|(x, _)| x.cmp(t))
                        .ok()
                        .map(|i| col.values[i].1);
                    row.push(fmt_opt(v));
                }
                row
            })
            .collect()
    }

    pub fn chart(&self) -> Chart {
        Chart {
            title: self.title.clone(),
            x_label: "t".into(),
            y_label: self.y_label.clone(),
            series: self
                .columns
                .iter()
                .map(|c| Series {
                    name: c.name.clone(),
                    points: c.values.iter().map(|&(t, v)| (t.value(), v)).collect(),
                    dashed: c.dashed,
                })
                .collect(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(
            &dir.join(format!("fig{}.csv", self.id)),
            &header,
            self.rows(),
        )?;
        let svg_path = dir.join(format!("fig{}.svg", self.id));
        fs::write(&svg_path, self.chart().render())
            .with_context(|| format!("writing {}", svg_path.display()))?;
        Ok(())
    }
}
