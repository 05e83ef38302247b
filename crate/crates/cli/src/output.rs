//! CSV emission and parsing. Floats are written with 17 significant digits
//! so every value round-trips to the identical `f64`; absent cells are empty.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use auction_core::{CoefficientPath, EquilibriumPath, MarketParams, ModelKind};

/// `{:.16e}` for finite values; `inf`, `-inf`, `nan` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn parse_opt(cell: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse()
        .map(Some)
        .map_err(|_| anyhow!("invalid number `{cell}`"))
}

/// Creates `dir` and returns it.
pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

/// Output directory for one horizon: `out` itself for a single `N`, else
/// `out/N{n}`.
pub fn horizon_dir(out: &Path, n: usize, multiple: bool) -> Result<PathBuf> {
    if multiple {
        ensure_dir(&out.join(format!("N{n}")))
    } else {
        ensure_dir(out)
    }
}

pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub const COEFFICIENT_HEADER: [&str; 4] = ["n", "a", "b", "c"];
pub const PATH_HEADER: [&str; 6] = ["n", "beta", "lambda", "sigma", "alpha", "delta"];

/// Rows `n = 0..=N`: `a_n`, `b_n` for `n < N`, `c_n` for `n >= 1`.
pub fn write_coefficients(path: &Path, coeffs: &CoefficientPath) -> Result<()> {
    let n_periods = coeffs.n_periods();
    let rows = (0..=n_periods).map(|n| {
        let ab = |f: fn(&CoefficientPath, usize) -> f64| (n < n_periods).then(|| f(coeffs, n));
        vec![
            n.to_string(),
            fmt_opt(ab(CoefficientPath::a)),
            fmt_opt(ab(CoefficientPath::b)),
            fmt_opt((n >= 1).then(|| coeffs.c(n))),
        ]
    });
    write_csv(path, &COEFFICIENT_HEADER, rows)
}

/// Rows `n = 0..=N`: `β_n`, `λ_n` for `n >= 1`, `Σ_n` always, `α_n`, `δ_n`
/// for `n < N`.
pub fn write_path(path: &Path, eq: &EquilibriumPath) -> Result<()> {
    let n_periods = eq.n_periods();
    let rows = (0..=n_periods).map(|n| {
        let traded = n >= 1;
        let open = n < n_periods;
        vec![
            n.to_string(),
            fmt_opt(traded.then(|| eq.beta(n))),
            fmt_opt(traded.then(|| eq.lambda(n))),
            fmt_f64(eq.sigma(n)),
            fmt_opt(open.then(|| eq.alpha(n))),
            fmt_opt(open.then(|| eq.delta(n))),
        ]
    });
    write_csv(path, &PATH_HEADER, rows)
}

/// `key,value` run metadata.
pub fn write_meta(
    path: &Path,
    model: ModelKind,
    params: &MarketParams,
    eq: &EquilibriumPath,
) -> Result<()> {
    let rows = [
        ("model", model.as_str().to_string()),
        ("n_periods", params.n_periods.to_string()),
        ("sigma0", fmt_f64(params.sigma0_sq)),
        ("sigma_u", fmt_f64(params.sigma_u)),
        ("p0", fmt_f64(params.p0)),
        ("dt", fmt_f64(params.dt())),
        ("ex_ante_profit", fmt_f64(eq.ex_ante_profit())),
        ("sigma_underflow", eq.sigma_underflow().to_string()),
    ];
    write_csv(
        path,
        &["key", "value"],
        rows.into_iter().map(|(k, v)| vec![k.to_string(), v]),
    )
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<Vec<Option<f64>>>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(anyhow!("{}: unexpected header {found:?}", path.display()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(rec.iter().map(parse_opt).collect::<Result<Vec<_>>>()?);
    }
    Ok(rows)
}

/// Parses a `coefficients.csv` back into a validated [`CoefficientPath`].
pub fn read_coefficients(path: &Path, model: ModelKind) -> Result<CoefficientPath> {
    let rows = read_rows(path, &COEFFICIENT_HEADER)?;
    let n_periods = rows.len().saturating_sub(1);
    let column = |j: usize, range: std::ops::Range<usize>| -> Result<Vec<f64>> {
        range
            .map(|n| {
                rows[n][j].ok_or_else(|| anyhow!("missing {} at n={n}", COEFFICIENT_HEADER[j]))
            })
            .collect()
    };
    let a = column(1, 0..n_periods)?;
    let b = column(2, 0..n_periods)?;
    let c = column(3, 1..n_periods + 1)?;
    Ok(CoefficientPath::new(model, a, b, c)?)
}

/// Parses a `path.csv` into its columns (`None` for empty cells).
pub fn read_path_columns(path: &Path) -> Result<Vec<Vec<Option<f64>>>> {
    read_rows(path, &PATH_HEADER)
}
